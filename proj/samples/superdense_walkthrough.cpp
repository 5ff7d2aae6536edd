// Sends two classical bits through one qubit of a partially entangled pair:
// Bob encodes, Alice filters and reads out in the Bell basis of the filtered
// frame. Inconclusive rounds are the price of the tilted spectrum.

#include <cstdio>

#include "qconc/superdense.hpp"

using namespace qconc;

int main() {
    const double lambda2 = 0.25;
    const PureBipartiteState pair = state_from_lambda2(lambda2);
    std::printf("shared pair lambda = (%.2f, %.2f), expected success rate %.2f\n",
                1.0 - lambda2, lambda2, success_probability(pair));

    for (int msg = 0; msg < 4; ++msg) {
        std::size_t attempts = 0;
        for (std::uint64_t seed = 1;; ++seed) {
            ++attempts;
            const TrialOutcome out = decode_run(pair, msg, derive_stream(99, 10 * msg + seed));
            if (out.success) {
                std::printf("message %d decoded as %d after %zu rounds\n", msg, out.decoded,
                            attempts);
                break;
            }
        }
    }

    const BatchResult batch = run_batch(pair, 20000, 7);
    std::printf("batch: %zu/%zu successes (rate %.4f), wrong decodes among successes: %zu\n",
                batch.successes, batch.trials, batch.success_rate, batch.errors_given_success);
    return 0;
}
