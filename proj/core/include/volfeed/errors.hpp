#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace volfeed {

// Domain errors carry a stable machine-readable name (printed by the CLI on
// exit code 1) alongside the human-readable message.
class domain_error : public std::runtime_error {
public:
    domain_error(std::string name, const std::string& what)
        : std::runtime_error(what), name_(std::move(name)) {}

    const std::string& name() const noexcept { return name_; }

private:
    std::string name_;
};

#define VOLFEED_DEFINE_ERROR(type, name)                              \
    class type : public domain_error {                                \
    public:                                                           \
        explicit type(const std::string& what)                        \
            : domain_error(name, what) {}                             \
    }

// model-core
VOLFEED_DEFINE_ERROR(non_positive_speed, "NonPositiveSpeed");
VOLFEED_DEFINE_ERROR(non_positive_vol_of_vol, "NonPositiveVolOfVol");
VOLFEED_DEFINE_ERROR(correlation_out_of_range, "CorrelationOutOfRange");
VOLFEED_DEFINE_ERROR(gamma_zero_requires_r_greater_alpha, "GammaZeroRequiresRGreaterAlpha");

// pd-solver
VOLFEED_DEFINE_ERROR(no_solution, "NoSolution");
VOLFEED_DEFINE_ERROR(sqrt_domain_violation, "SqrtDomainViolation");
VOLFEED_DEFINE_ERROR(mesh_refinement_exhausted, "MeshRefinementExhausted");
VOLFEED_DEFINE_ERROR(undefined_at_zero, "UndefinedAtZero");

// simulator
VOLFEED_DEFINE_ERROR(insufficient_data, "InsufficientData");

// calibrator
VOLFEED_DEFINE_ERROR(parse_error, "ParseError");
VOLFEED_DEFINE_ERROR(missing_column, "MissingColumn");
VOLFEED_DEFINE_ERROR(infeasible_point, "InfeasiblePoint");
VOLFEED_DEFINE_ERROR(all_points_infeasible, "AllPointsInfeasible");

#undef VOLFEED_DEFINE_ERROR

}  // namespace volfeed
