#pragma once

#include "space_grid.hpp"
#include "time_grid.hpp"

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace fracdiff {

enum class Producer { spectral, l1 };

inline const char* producer_name(Producer p) {
    return p == Producer::spectral ? "spectral" : "l1";
}

/// Solution samples on the space x time lattice (column k = time node k),
/// tagged with the solver that produced them. The iteration report holds
/// the per-Picard-sweep sup-norm deltas of the spectral solver.
struct Field {
    Eigen::MatrixXd values;
    Producer producer = Producer::spectral;
    SpaceGrid grid;
    TimeGrid tgrid;
    std::vector<double> iteration_report;
    bool truncation_warning = false;
    double truncation_loss = 0.0; // worst relative projection loss of Qu

    double sup_norm() const { return values.size() == 0 ? 0.0 : values.cwiseAbs().maxCoeff(); }
};

} // namespace fracdiff
