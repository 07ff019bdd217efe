#include "bosefit/fit.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

#include "bosefit/errors.hpp"

namespace bosefit {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Free parameters live in log space: theta = (log c, log beta[, log alpha]).
class LogParameterization {
public:
    LogParameterization(std::optional<double> fixed_alpha) : fixed_alpha_(fixed_alpha) {}

    int size() const { return fixed_alpha_ ? 2 : 3; }

    Eigen::VectorXd encode(const ModelParams& p) const {
        Eigen::VectorXd theta(size());
        theta[0] = std::log(p.c);
        theta[1] = std::log(p.beta);
        if (!fixed_alpha_) {
            theta[2] = std::log(p.alpha);
        }
        return theta;
    }

    ModelParams decode(const Eigen::VectorXd& theta) const {
        return {std::exp(theta[0]), fixed_alpha_ ? *fixed_alpha_ : std::exp(theta[2]),
                std::exp(theta[1])};
    }

    // Chain rule from d/d(c, alpha, beta) to d/d theta.
    void fill_row(const std::array<double, 3>& grad, const ModelParams& p, double scale,
                  Eigen::MatrixXd& jac, Eigen::Index row) const {
        jac(row, 0) = scale * grad[0] * p.c;
        jac(row, 1) = scale * grad[2] * p.beta;
        if (!fixed_alpha_) {
            jac(row, 2) = scale * grad[1] * p.alpha;
        }
    }

private:
    std::optional<double> fixed_alpha_;
};

class Problem {
public:
    Problem(std::span<const DensityPoint> points, const FitOptions& opts)
        : points_(points), opts_(opts), param_(opts.fix_alpha) {
        sqrt_w_.reserve(points.size());
        for (const auto& pt : points) {
            sqrt_w_.push_back(std::sqrt(pt.weight));
        }
    }

    const LogParameterization& parameterization() const { return param_; }

    Eigen::VectorXd residuals(const ModelParams& p) const {
        const auto m = model_values(points_, opts_.model, p, opts_.residual_mode, opts_.accuracy);
        Eigen::VectorXd r(static_cast<Eigen::Index>(points_.size()));
        for (std::size_t i = 0; i < points_.size(); ++i) {
            r[static_cast<Eigen::Index>(i)] = sqrt_w_[i] * (m[i] - points_[i].rho);
        }
        return r;
    }

    Eigen::MatrixXd jacobian(const ModelParams& p) const {
        const auto g = model_gradients(points_, opts_.model, p, opts_.residual_mode, opts_.accuracy);
        Eigen::MatrixXd jac(static_cast<Eigen::Index>(points_.size()), param_.size());
        for (std::size_t i = 0; i < points_.size(); ++i) {
            param_.fill_row(g[i], p, sqrt_w_[i], jac, static_cast<Eigen::Index>(i));
        }
        return jac;
    }

private:
    std::span<const DensityPoint> points_;
    const FitOptions& opts_;
    LogParameterization param_;
    std::vector<double> sqrt_w_;
};

bool all_finite(const Eigen::VectorXd& v) { return v.allFinite(); }

}  // namespace

void FitOptions::validate() const {
    if (max_iterations < 1 || !(step_tol > 0.0) || !(grad_tol > 0.0) || !(damping_init > 0.0)) {
        throw DomainError("FitOptions: limits and tolerances must be > 0");
    }
    if (fix_alpha && !(*fix_alpha > 0.0 && std::isfinite(*fix_alpha))) {
        throw DomainError("FitOptions: fix_alpha must be finite and > 0");
    }
    accuracy.validate();
}

std::vector<double> model_values(std::span<const DensityPoint> points, ModelKind kind,
                                 const ModelParams& p, Representative mode, const Accuracy& acc) {
    std::vector<double> out;
    out.reserve(points.size());
    for (const auto& pt : points) {
        if (mode == Representative::midpoint) {
            out.push_back(density(kind, p, pt.r));
        } else {
            out.push_back(bin_mass(kind, p, pt.bin_lo, pt.bin_hi, acc) / pt.width());
        }
    }
    return out;
}

std::vector<std::array<double, 3>> model_gradients(std::span<const DensityPoint> points, ModelKind kind,
                                                   const ModelParams& p, Representative mode,
                                                   const Accuracy& acc) {
    std::vector<std::array<double, 3>> out;
    out.reserve(points.size());
    for (const auto& pt : points) {
        if (mode == Representative::midpoint) {
            out.push_back(density_gradient(kind, p, pt.r));
        } else {
            auto g = bin_mass_gradient(kind, p, pt.bin_lo, pt.bin_hi, acc);
            for (double& v : g) {
                v /= pt.width();
            }
            out.push_back(g);
        }
    }
    return out;
}

ModelParams initial_guess(std::span<const DensityPoint> points, ModelKind kind,
                          std::optional<double> fix_alpha) {
    double mass = 0.0;
    double moment = 0.0;
    for (const auto& pt : points) {
        const double m = pt.rho * pt.width();
        mass += m;
        moment += pt.r * m;
    }
    if (!(mass > 0.0)) {
        throw DegenerateDataError("initial_guess: no point carries positive mass");
    }
    // Mean over the observed range; equals sum(r rho width) for unit total mass.
    const double mean = moment / mass;
    if (!(mean > 0.0)) {
        throw DegenerateDataError("initial_guess: mean income is zero");
    }
    const double alpha = fix_alpha.value_or(1.5);
    const double beta = mean_income_ratio(alpha, kind) / mean;
    return {scale_for_population(1.0, alpha, beta, kind), alpha, beta};
}

double r_squared(std::span<const DensityPoint> points, ModelKind kind, const ModelParams& p,
                 Representative mode, const Accuracy& acc) {
    if (points.size() < 2) {
        throw DegenerateDataError("r_squared: at least 2 points are required");
    }
    const auto m = model_values(points, kind, p, mode, acc);
    double mean = 0.0;
    for (const auto& pt : points) {
        mean += pt.rho;
    }
    mean /= static_cast<double>(points.size());
    double ss_res = 0.0;
    double ss_tot = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        ss_res += (m[i] - points[i].rho) * (m[i] - points[i].rho);
        ss_tot += (points[i].rho - mean) * (points[i].rho - mean);
    }
    if (ss_tot == 0.0) {
        throw DegenerateDataError("r_squared: data have zero variance, R^2 undefined");
    }
    return 1.0 - ss_res / ss_tot;
}

FitResult fit(std::span<const DensityPoint> points, const FitOptions& opts) {
    opts.validate();
    const Problem problem(points, opts);
    const LogParameterization& param = problem.parameterization();
    if (points.size() < static_cast<std::size_t>(param.size())) {
        throw ValidationError("fit: need at least " + std::to_string(param.size()) + " points, got " +
                              std::to_string(points.size()));
    }
    for (const auto& pt : points) {
        if (!(pt.width() > 0.0)) {
            throw ValidationError("fit: every bin must have positive width");
        }
    }

    FitResult result;
    result.model = opts.model;

    Eigen::VectorXd theta = param.encode(initial_guess(points, opts.model, opts.fix_alpha));
    ModelParams current = param.decode(theta);
    Eigen::VectorXd r = problem.residuals(current);
    if (!all_finite(r)) {
        throw DegenerateDataError("fit: model is not finite at the starting point");
    }
    double objective = r.squaredNorm();
    Eigen::MatrixXd jac = problem.jacobian(current);
    result.trace.push_back(objective);

    double damping = opts.damping_init;
    double growth = 2.0;
    Eigen::VectorXd scale = Eigen::VectorXd::Zero(param.size());

    int iteration = 0;
    while (true) {
        const Eigen::MatrixXd normal = jac.transpose() * jac;
        const Eigen::VectorXd gradient = jac.transpose() * r;
        scale = scale.cwiseMax(normal.diagonal());

        const double r_norm = std::sqrt(objective);
        if (r_norm == 0.0) {
            result.converged = true;
            result.stop_reason = "zero residual";
            break;
        }
        double cosine = 0.0;
        for (Eigen::Index j = 0; j < gradient.size(); ++j) {
            const double col = std::sqrt(normal(j, j));
            if (col == 0.0) {
                throw SingularJacobianError("fit: a parameter has no effect on the residuals", damping);
            }
            cosine = std::max(cosine, std::abs(gradient[j]) / (col * r_norm));
        }
        if (cosine <= opts.grad_tol) {
            result.converged = true;
            result.stop_reason = "gradient";
            break;
        }
        if (iteration >= opts.max_iterations) {
            result.stop_reason = "iteration limit";
            break;
        }
        ++iteration;

        Eigen::MatrixXd lhs = normal;
        lhs.diagonal() += damping * scale;
        const Eigen::LDLT<Eigen::MatrixXd> solver(lhs);
        if (solver.info() != Eigen::Success || !solver.isPositive()) {
            throw SingularJacobianError("fit: damped normal equations are singular", damping);
        }
        const Eigen::VectorXd step = solver.solve(-gradient);
        if (!all_finite(step)) {
            throw SingularJacobianError("fit: non-finite step", damping);
        }
        if (step.lpNorm<Eigen::Infinity>() <= opts.step_tol) {
            result.converged = true;
            result.stop_reason = "step";
            break;
        }

        const Eigen::VectorXd trial_theta = theta + step;
        const ModelParams trial = param.decode(trial_theta);
        Eigen::VectorXd trial_r;
        bool usable = false;
        try {
            trial.validate();
            trial_r = problem.residuals(trial);
            usable = all_finite(trial_r);
        } catch (const std::exception&) {
            usable = false;
        }
        const double trial_objective = usable ? trial_r.squaredNorm() : kInfinity;

        if (trial_objective < objective) {
            const double predicted = -(2.0 * step.dot(gradient) + step.dot(normal * step));
            const double gain = predicted > 0.0 ? (objective - trial_objective) / predicted : 0.0;
            damping *= std::max(1.0 / 3.0, 1.0 - std::pow(2.0 * gain - 1.0, 3));
            growth = 2.0;
            theta = trial_theta;
            current = trial;
            r = std::move(trial_r);
            objective = trial_objective;
            jac = problem.jacobian(current);
            result.trace.push_back(objective);
        } else {
            damping *= growth;
            growth *= 2.0;
            if (!std::isfinite(damping)) {
                result.stop_reason = "damping overflow";
                break;
            }
        }
    }

    result.params = current;
    result.iterations = iteration;
    result.objective = objective;
    result.residuals.assign(r.data(), r.data() + r.size());
    try {
        result.r_squared = r_squared(points, opts.model, current, opts.residual_mode, opts.accuracy);
    } catch (const DegenerateDataError&) {
        result.r_squared = kNaN;
    }
    return result;
}

}  // namespace bosefit
