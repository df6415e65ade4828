#include "ccdf/interactionfit.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace ccdf {

void OrbitalGrid::validate() const {
    if (points.size() != weights.size() || points.size() != orbitals.rows())
        throw std::invalid_argument("OrbitalGrid: inconsistent table sizes");
    if ((weights.array() <= 0.0).any())
        throw std::invalid_argument("OrbitalGrid: quadrature weights must be positive");
    const Eigen::MatrixXd overlap =
        orbitals.transpose() * weights.asDiagonal() * orbitals;
    const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n_orbitals(), n_orbitals());
    if ((overlap - id).cwiseAbs().maxCoeff() > 1e-6)
        throw std::invalid_argument("OrbitalGrid: orbitals not orthonormal on the grid");
}

OrbitalGrid harmonic_oscillator_grid(int n_orbitals, int n_points, double extent) {
    OrbitalGrid g;
    g.points.resize(n_points);
    g.weights.resize(n_points);
    const double h = 2.0 * extent / (n_points - 1);
    for (int k = 0; k < n_points; ++k) {
        g.points(k) = -extent + k * h;
        g.weights(k) = (k == 0 || k == n_points - 1) ? 0.5 * h : h;
    }
    // normalized oscillator recurrence: psi_{n+1} = x sqrt(2/(n+1)) psi_n - sqrt(n/(n+1)) psi_{n-1}
    g.orbitals.resize(n_points, n_orbitals);
    const double norm0 = std::pow(M_PI, -0.25);
    for (int k = 0; k < n_points; ++k) {
        const double x = g.points(k);
        double prev = 0.0, cur = norm0 * std::exp(-0.5 * x * x);
        for (int n = 0; n < n_orbitals; ++n) {
            g.orbitals(k, n) = cur;
            const double next = x * std::sqrt(2.0 / (n + 1)) * cur - std::sqrt(double(n) / (n + 1)) * prev;
            prev = cur;
            cur = next;
        }
    }
    g.validate();
    return g;
}

OrbitalGrid read_grid(std::istream& in) {
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        std::vector<double> row;
        double v;
        while (ls >> v) row.push_back(v);
        if (row.empty()) continue;
        if (row.size() < 3) throw std::runtime_error("grid file: need x, w and at least one orbital");
        if (!rows.empty() && row.size() != rows.front().size())
            throw std::runtime_error("grid file: ragged rows");
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw std::runtime_error("grid file: empty");
    OrbitalGrid g;
    const int np = static_cast<int>(rows.size());
    const int no = static_cast<int>(rows.front().size()) - 2;
    g.points.resize(np);
    g.weights.resize(np);
    g.orbitals.resize(np, no);
    for (int k = 0; k < np; ++k) {
        g.points(k) = rows[k][0];
        g.weights(k) = rows[k][1];
        for (int n = 0; n < no; ++n) g.orbitals(k, n) = rows[k][2 + n];
    }
    g.validate();
    return g;
}

void write_grid(const OrbitalGrid& grid, std::ostream& out) {
    char buf[48];
    for (int k = 0; k < grid.n_points(); ++k) {
        std::snprintf(buf, sizeof buf, "%.15E %.15E", grid.points(k), grid.weights(k));
        out << buf;
        for (int n = 0; n < grid.n_orbitals(); ++n) {
            std::snprintf(buf, sizeof buf, " %.15E", grid.orbitals(k, n));
            out << buf;
        }
        out << "\n";
    }
}

namespace {

std::map<std::string, InteractionFamily> make_registry() {
    std::map<std::string, InteractionFamily> reg;
    auto add = [&reg](InteractionFamily fam) { reg[fam.id] = std::move(fam); };

    {
        InteractionFamily f;
        f.id = "confinement_poly";  // u = g0 + g1 x^2
        f.arity = 2;
        f.two_body = false;
        f.u = [](const Eigen::VectorXd& p, double x) { return p(0) + p(1) * x * x; };
        f.lower_bounds = Eigen::Vector2d(-100.0, -100.0);
        f.upper_bounds = Eigen::Vector2d(100.0, 100.0);
        add(std::move(f));
    }
    {
        InteractionFamily f;
        f.id = "coulomb_erf";  // d0 erf(d1 r)/r, smooth at r=0
        f.arity = 2;
        f.two_body = true;
        f.g = [](const Eigen::VectorXd& p, double, double, double r) {
            if (r < 1e-12) return p(0) * p(1) * 2.0 / std::sqrt(M_PI);
            return p(0) * std::erf(p(1) * r) / r;
        };
        f.lower_bounds = Eigen::Vector2d(-100.0, 1e-3);
        f.upper_bounds = Eigen::Vector2d(100.0, 100.0);
        add(std::move(f));
    }
    {
        // soft-core form: the bare exp(-d1 r)/r is neither integrable on a 1D
        // grid nor smooth at r = 0, so both r's use the regularized distance
        InteractionFamily f;
        f.id = "yukawa";  // d0 exp(-d1 rho)/rho with rho = sqrt(r^2 + a0^2)
        f.arity = 2;
        f.two_body = true;
        constexpr double a0 = 0.5;
        f.g = [](const Eigen::VectorXd& p, double, double, double r) {
            const double rho = std::sqrt(r * r + a0 * a0);
            return p(0) * std::exp(-p(1) * rho) / rho;
        };
        f.lower_bounds = Eigen::Vector2d(-100.0, 0.0);
        f.upper_bounds = Eigen::Vector2d(100.0, 100.0);
        add(std::move(f));
    }
    {
        InteractionFamily f;
        f.id = "coulomb_soft";  // d0 / sqrt(r^2 + d1^2)
        f.arity = 2;
        f.two_body = true;
        f.g = [](const Eigen::VectorXd& p, double, double, double r) {
            return p(0) / std::sqrt(r * r + p(1) * p(1));
        };
        f.lower_bounds = Eigen::Vector2d(-100.0, 1e-3);
        f.upper_bounds = Eigen::Vector2d(100.0, 100.0);
        add(std::move(f));
    }
    return reg;
}

const std::map<std::string, InteractionFamily>& registry() {
    static const std::map<std::string, InteractionFamily> reg = make_registry();
    return reg;
}

}  // namespace

const InteractionFamily& family(const std::string& id) {
    auto it = registry().find(id);
    if (it == registry().end())
        throw std::invalid_argument("unsupported interaction family: " + id);
    return it->second;
}

std::vector<std::string> family_ids() {
    std::vector<std::string> out;
    for (const auto& [id, fam] : registry()) out.push_back(id);
    return out;
}

Eigen::MatrixXd eval_u(const InteractionModel& model, const OrbitalGrid& grid) {
    const InteractionFamily& fam = family(model.family_id);
    if (fam.two_body) throw std::invalid_argument("eval_u: " + model.family_id + " is a two-body family");
    if (model.params.size() != fam.arity)
        throw std::invalid_argument("eval_u: parameter count mismatch");
    Eigen::VectorXd uw(grid.n_points());
    for (int k = 0; k < grid.n_points(); ++k)
        uw(k) = grid.weights(k) * fam.u(model.params, grid.points(k));
    return grid.orbitals.transpose() * uw.asDiagonal() * grid.orbitals;
}

Tensor4 eval_g(const InteractionModel& model, const OrbitalGrid& grid) {
    const InteractionFamily& fam = family(model.family_id);
    if (!fam.two_body) throw std::invalid_argument("eval_g: " + model.family_id + " is a one-body family");
    if (model.params.size() != fam.arity)
        throw std::invalid_argument("eval_g: parameter count mismatch");
    const int np = grid.n_points();
    const int no = grid.n_orbitals();
    Eigen::MatrixXd gkl(np, np);
    for (int k = 0; k < np; ++k)
        for (int l = 0; l < np; ++l) {
            const double x1 = grid.points(k), x2 = grid.points(l);
            gkl(k, l) = grid.weights(k) * grid.weights(l) * fam.g(model.params, x1, x2, std::abs(x1 - x2));
        }
    // pair table B_{k,(P,R)} = phi_P(x_k) phi_R(x_k); tensor = B^T gkl B
    Eigen::MatrixXd B(np, no * no);
    for (int p = 0; p < no; ++p)
        for (int r = 0; r < no; ++r)
            B.col(p * no + r) = grid.orbitals.col(p).cwiseProduct(grid.orbitals.col(r));
    const Eigen::MatrixXd contracted = B.transpose() * gkl * B;
    Tensor4 out(no);
    for (int p = 0; p < no; ++p)
        for (int q = 0; q < no; ++q)
            for (int r = 0; r < no; ++r)
                for (int s = 0; s < no; ++s)
                    out(p, q, r, s) = contracted(p * no + r, q * no + s);
    return out;
}

double l1_objective_one_body(const Eigen::MatrixXd& u, const Eigen::MatrixXd& chi1) {
    return (u - chi1).cwiseAbs().sum();
}

double l1_objective_two_body(const Tensor4& g, const Tensor4& chi2) {
    double sum = 0.0;
    const auto& a = g.data();
    const auto& b = chi2.data();
    for (std::size_t i = 0; i < a.size(); ++i) sum += std::abs(a[i] - b[i]);
    return sum;
}

FitReport fit_interaction(const ChiTensors& chi, const OrbitalGrid& grid,
                          const std::string& family_id, const Eigen::VectorXd& init,
                          const FitOptions& opts) {
    const InteractionFamily& fam = family(family_id);
    if (init.size() != fam.arity)
        throw std::invalid_argument("fit_interaction: initial parameter count mismatch");
    if (fam.two_body) {
        if (chi.chi2.dim() != grid.n_orbitals())
            throw std::invalid_argument("fit_interaction: chi2 dimension mismatch with grid");
    } else if (chi.chi1.rows() != grid.n_orbitals() || chi.chi1.cols() != grid.n_orbitals()) {
        throw std::invalid_argument("fit_interaction: chi1 dimension mismatch with grid");
    }

    FitReport report;
    int evals = 0;
    auto objective = [&](const Eigen::VectorXd& p) {
        ++evals;
        InteractionModel m{family_id, p};
        return fam.two_body ? l1_objective_two_body(eval_g(m, grid), chi.chi2)
                            : l1_objective_one_body(eval_u(m, grid), chi.chi1);
    };
    auto clamp = [&](Eigen::VectorXd p) {
        for (int i = 0; i < p.size(); ++i)
            p(i) = std::min(fam.upper_bounds(i), std::max(fam.lower_bounds(i), p(i)));
        return p;
    };

    Eigen::VectorXd best = clamp(init);
    double fbest = objective(best);
    const double f_init = fbest;
    report.trajectory.push_back(fbest);

    Eigen::VectorXd step(fam.arity);
    for (int i = 0; i < fam.arity; ++i)
        step(i) = opts.initial_step * std::max(1.0, std::abs(best(i)));

    // compass search: poll +-step per coordinate, halve on an unsuccessful poll
    while (evals < opts.budget && step.maxCoeff() > opts.step_tol) {
        bool improved = false;
        for (int i = 0; i < fam.arity && evals < opts.budget; ++i) {
            for (double dir : {+1.0, -1.0}) {
                Eigen::VectorXd trial = best;
                trial(i) += dir * step(i);
                trial = clamp(trial);
                const double f = objective(trial);
                if (f < fbest) {
                    fbest = f;
                    best = trial;
                    report.trajectory.push_back(fbest);
                    improved = true;
                    break;
                }
            }
        }
        if (!improved) step *= 0.5;
    }

    report.model = {family_id, best};
    report.objective = fbest;
    report.evaluations = evals;
    report.converged = step.maxCoeff() <= opts.step_tol;
    report.degenerate = (f_init > 0.0) && (f_init - fbest) < 1e-14 * std::max(1.0, f_init) &&
                        step.maxCoeff() > opts.step_tol;

    if (fam.two_body) {
        InteractionModel m{family_id, best};
        const Tensor4 g = eval_g(m, grid);
        const auto& a = g.data();
        const auto& b = chi.chi2.data();
        report.residual_two_body.resize(a.size());
        for (std::size_t i = 0; i < a.size(); ++i) report.residual_two_body[i] = std::abs(a[i] - b[i]);
    } else {
        InteractionModel m{family_id, best};
        report.residual_one_body = (eval_u(m, grid) - chi.chi1).cwiseAbs();
    }
    return report;
}

}  // namespace ccdf
