#pragma once

#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace radns {

class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
    explicit ConfigError(const std::vector<std::string>& errors)
        : std::runtime_error(join(errors)), errors_(errors) {}

    [[nodiscard]] auto errors() const -> const std::vector<std::string>& { return errors_; }

private:
    static auto join(const std::vector<std::string>& errs) -> std::string {
        std::ostringstream os;
        for (std::size_t i = 0; i < errs.size(); ++i) os << (i ? "; " : "") << errs[i];
        return os.str();
    }
    std::vector<std::string> errors_;
};

struct FluidParams {
    double gamma = 1.4;
    double mu = 0.1;
    double lambda = 0.1;
    double kappa = 0.1;
    int n = 3;
    double R = 1.0;

    [[nodiscard]] auto m() const -> int { return n - 1; }
    [[nodiscard]] auto beta() const -> double { return 2.0 * mu + lambda; }
    [[nodiscard]] auto cv() const -> double { return R / (gamma - 1.0); }
    [[nodiscard]] auto bulk() const -> double { return lambda + 2.0 * mu / n; }

    [[nodiscard]] auto pressure(double v, double e) const -> double { return (gamma - 1.0) * e / v; }

    // physical conditions on the transport coefficients and the adiabatic exponent
    [[nodiscard]] auto validate() const -> std::vector<std::string> {
        std::vector<std::string> errs;
        if (!(gamma > 1.0)) errs.emplace_back("gamma must satisfy gamma > 1 (adiabatic exponent)");
        if (!(mu > 0.0)) errs.emplace_back("mu must satisfy mu > 0 (physical viscosity condition)");
        if (!(kappa > 0.0)) errs.emplace_back("kappa must satisfy kappa > 0 (physical heat-conduction condition)");
        if (n != 2 && n != 3) errs.emplace_back("n must be 2 or 3");
        // closed condition; lambda = -2mu/n is admissible
        if (n > 0 && lambda + 2.0 * mu / n < -1e-14 * std::max(1.0, std::abs(lambda)))
            errs.emplace_back("lambda must satisfy lambda + 2 mu / n >= 0 (physical viscosity condition)");
        if (!(R > 0.0)) errs.emplace_back("R must be positive");
        return errs;
    }
};

enum class MonitorMode { Strict, Exploratory };

inline auto to_string(MonitorMode m) -> std::string { return m == MonitorMode::Strict ? "strict" : "exploratory"; }

struct SolverConfig {
    int N = 1024;
    double T = 0.5;
    double cfl = 0.4;
    double dt_min = 1e-10;
    std::vector<double> output_times;  // empty: 16 uniform samples on (0, T]
    MonitorMode mode = MonitorMode::Strict;
    bool keep_all_steps = false;  // store every accepted step (weak-form checks)
    int max_newton = 30;
    double newton_tol = 1e-13;

    [[nodiscard]] auto validate() const -> std::vector<std::string> {
        std::vector<std::string> errs;
        if (N < 8) errs.emplace_back("N must be at least 8");
        if (!(T > 0.0)) errs.emplace_back("T must be positive");
        if (!(cfl > 0.0)) errs.emplace_back("cfl must be positive");
        if (!(dt_min > 0.0)) errs.emplace_back("dt_min must be positive");
        double prev = 0.0;
        for (double t : output_times) {
            if (!(t > prev) || t > T) {
                errs.emplace_back("output_times must be strictly increasing within (0, T]");
                break;
            }
            prev = t;
        }
        return errs;
    }

    [[nodiscard]] auto sample_times() const -> std::vector<double> {
        if (!output_times.empty()) return output_times;
        std::vector<double> ts;
        for (int i = 1; i <= 16; ++i) ts.push_back(T * i / 16.0);
        return ts;
    }
};

}  // namespace radns
