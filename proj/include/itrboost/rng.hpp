#pragma once

#include <cstdint>

namespace itrboost {

// Counter-based generator: every draw is a pure function of
// (seed, stream, counter), so trials are reproducible across platforms and
// independent of evaluation order. Streams separate the independent sources
// within one trial (covariates / treatments / noise) and derive bench seeds.
class CounterRng {
public:
    CounterRng(std::uint64_t seed, std::uint64_t stream)
        : seed_(seed), stream_(stream), counter_(0) {}

    std::uint64_t next_u64();
    double next_uniform01();        // [0, 1)
    double next_uniform(double lo, double hi);
    double next_normal();           // N(0,1) via inverse CDF

    static std::uint64_t hash(std::uint64_t seed, std::uint64_t stream,
                              std::uint64_t counter);

private:
    std::uint64_t seed_;
    std::uint64_t stream_;
    std::uint64_t counter_;
};

// Inverse standard normal CDF (Wichura's AS 241, double precision).
double normal_quantile(double p);

}  // namespace itrboost
