#pragma once

#include <Eigen/Dense>
#include <deque>

namespace ccdf {

/// Pulay mixing over the most recent (vector, residual) pairs.
class DiisAccelerator {
  public:
    explicit DiisAccelerator(int depth = 8) : depth_(depth) {}

    /// Push the latest quasi-Newton iterate and its residual; returns the
    /// extrapolated iterate (or the input while history is too short).
    Eigen::VectorXd extrapolate(const Eigen::VectorXd& x, const Eigen::VectorXd& r) {
        xs_.push_back(x);
        rs_.push_back(r);
        while (static_cast<int>(xs_.size()) > depth_) {
            xs_.pop_front();
            rs_.pop_front();
        }
        const int m = static_cast<int>(xs_.size());
        if (m < 2) return x;
        Eigen::MatrixXd B = Eigen::MatrixXd::Zero(m + 1, m + 1);
        for (int a = 0; a < m; ++a)
            for (int b = 0; b < m; ++b) B(a, b) = rs_[a].dot(rs_[b]);
        const double scale = B.topLeftCorner(m, m).diagonal().maxCoeff();
        if (scale < 1e-28) return x;  // residuals at round-off, extrapolation is noise
        B.topLeftCorner(m, m) /= scale;
        B.row(m).head(m).setConstant(-1.0);
        B.col(m).head(m).setConstant(-1.0);
        Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m + 1);
        rhs(m) = -1.0;
        const Eigen::VectorXd c = B.fullPivLu().solve(rhs);
        if (!c.allFinite() || c.head(m).cwiseAbs().maxCoeff() > 1e4) return x;
        Eigen::VectorXd out = Eigen::VectorXd::Zero(x.size());
        for (int a = 0; a < m; ++a) out += c(a) * xs_[a];
        return out;
    }

  private:
    int depth_;
    std::deque<Eigen::VectorXd> xs_, rs_;
};

}  // namespace ccdf
