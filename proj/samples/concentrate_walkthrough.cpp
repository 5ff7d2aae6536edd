// Builds a partially entangled pair, derives its optimal local filter, and
// runs the probe-dilated measurement until the filter fires.

#include <cstdio>

#include "qconc/concentrate.hpp"
#include "qconc/kraus.hpp"

using namespace qconc;

int main() {
    // |psi> = sqrt(0.75)|00> + sqrt(0.25)|11>
    ComplexMatrix coeff(2, 2);
    coeff(0, 0) = std::sqrt(0.75);
    coeff(1, 1) = std::sqrt(0.25);
    const PureBipartiteState psi(coeff);

    std::printf("best single-shot success probability: %.6f\n", gamma_max(psi));

    const ConcentrationResult r = concentrate(psi);
    std::printf("filter applied analytically: p = %.6f, output maximal: %s\n",
                r.success_probability,
                is_maximally_entangled(r.output_state, 1e-8) ? "yes" : "no");

    const ProbeDilation dilation = dilate(r.filter);
    std::printf("probe dilation is a %zux%zu unitary, success branch = outcome %zu\n",
                dilation.unitary().rows(), dilation.unitary().cols(),
                dilation.success_outcome());

    for (std::uint64_t attempt = 1;; ++attempt) {
        const MeasurementOutcome m = simulate_measurement(dilation, psi, attempt);
        std::printf("attempt %llu: probe outcome %zu\n",
                    static_cast<unsigned long long>(attempt), m.outcome);
        if (m.outcome == dilation.success_outcome()) {
            std::printf("concentrated after %llu attempts; output spectrum:",
                        static_cast<unsigned long long>(attempt));
            for (double l : schmidt_coefficients(m.post_state)) std::printf(" %.6f", l);
            std::printf("\n");
            break;
        }
    }
    return 0;
}
