#include "driven/validity.hpp"

namespace driven {

ValidityReport full_report(const DriveParams& p, const BathSpec& b, const QuadratureConfig& quad) {
    p.validate();
    b.validate();
    quad.validate();

    ValidityReport report;
    report.a = b.a;
    report.weak_coupling_ok = b.a <= 1e-2;

    const MarkovConstant markov = markov_constant(b, 100.0 * b.beta());
    report.markov_C = markov.C;
    report.markov_converged = markov.converged;

    report.secular_margin = check_secular(p, b, markov.C);
    report.secular_ok = report.secular_margin > 100.0;

    const DrivingCheck driving = check_driving(p, b.a);
    report.driving_ratio = driving.ratio;
    report.driving_bound = driving.bound;
    report.driving_ok = driving.driving_ok;
    report.adiabatic_ok = driving.adiabatic_ok;
    return report;
}

}  // namespace driven
