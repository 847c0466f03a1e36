// Error taxonomy: configuration problems (usage, exit 1) vs mathematical
// failures of the algorithms themselves (exit 2, machine readable).
#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace kamtriv {

// Invalid user input: config files, CLI flags, malformed series files.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(std::vector<std::string> issues)
        : std::runtime_error(join(issues)), issues_(std::move(issues)) {}
    explicit ConfigError(const std::string& issue)
        : ConfigError(std::vector<std::string>{issue}) {}
    const std::vector<std::string>& issues() const { return issues_; }

private:
    static std::string join(const std::vector<std::string>& v) {
        std::string s;
        for (const auto& e : v) {
            if (!s.empty()) s += "; ";
            s += e;
        }
        return s;
    }
    std::vector<std::string> issues_;
};

// Base for failures of the mathematics: the inputs were well formed but the
// algorithm cannot produce a valid answer.
class MathError : public std::runtime_error {
public:
    MathError(std::string kind, const std::string& message)
        : std::runtime_error(message), kind_(std::move(kind)) {}
    const std::string& kind() const { return kind_; }

private:
    std::string kind_;
};

// A mode whose divisors all sit below the resonance threshold carries a
// coefficient too large to drop.
class ResonantModeError : public MathError {
public:
    ResonantModeError(std::vector<int> p, std::vector<int> q, double divisor,
                      double coeff_mag, const std::string& message)
        : MathError("resonance", message), p_(std::move(p)), q_(std::move(q)),
          divisor_(divisor), coeff_mag_(coeff_mag) {}
    const std::vector<int>& p() const { return p_; }
    const std::vector<int>& q() const { return q_; }
    double divisor() const { return divisor_; }
    double coeff_magnitude() const { return coeff_mag_; }

private:
    std::vector<int> p_, q_;
    double divisor_, coeff_mag_;
};

// Right-hand sides of the cohomological system fail the cross-generator
// compatibility identity beyond tolerance.
class IncompatibleError : public MathError {
public:
    IncompatibleError(double residual, double tolerance)
        : MathError("incompatible",
                    "compatibility residual " + std::to_string(residual) +
                        " exceeds tolerance " + std::to_string(tolerance)),
          residual_(residual), tolerance_(tolerance) {}
    double residual() const { return residual_; }
    double tolerance() const { return tolerance_; }

private:
    double residual_, tolerance_;
};

// A series that must vanish on the zero section (no v-degree-0 terms) does not.
class BadJetError : public MathError {
public:
    explicit BadJetError(const std::string& message) : MathError("bad_jet", message) {}
};

// Residual norms grew across two consecutive Newton steps.
class DivergedError : public MathError {
public:
    DivergedError(int step, double before, double after)
        : MathError("diverged", "residual grew for two consecutive steps ending at step " +
                                    std::to_string(step)),
          step_(step), before_(before), after_(after) {}
    int step() const { return step_; }
    double norm_before() const { return before_; }
    double norm_after() const { return after_; }

private:
    int step_;
    double before_, after_;
};

}  // namespace kamtriv
