#pragma once

#include <cstdint>
#include <string>

#include "kge/tensor.hpp"

namespace kge::scorers {

enum class Family { DistMult, ComplEx, QMult, Keci };

Family family_from_string(const std::string& name);
const char* family_name(Family f);

// All four scorers are multiplicative: score(h,r,t) = combine(h,r) . t for a
// family-specific bilinear combine. Block layouts are contiguous (all real
// parts, then all imaginary parts, ...) — part of the checkpoint contract.
struct ScorerConfig {
    Family family = Family::Keci;
    std::int64_t d = 32;
    std::int64_t p = 0;  // Keci only
    std::int64_t q = 1;  // Keci only
    bool normalize = false;  // scale h and r rows to unit norm before scoring

    void validate() const;  // divisibility constraints per family
};

// Batched combine: H[n,d], R[n,d] -> U[n,d] with score rows = U . T rows.
Tensor combine(Tape* tape, const ScorerConfig& cfg, const Tensor& h, const Tensor& r);

// Single-triple scores over plain vectors (the non-graph entry point).
double score_distmult(const std::vector<double>& h, const std::vector<double>& r,
                      const std::vector<double>& t);
double score_complex(const std::vector<double>& h, const std::vector<double>& r,
                     const std::vector<double>& t);
double score_qmult(const std::vector<double>& h, const std::vector<double>& r,
                   const std::vector<double>& t);
double score_keci(const std::vector<double>& h, const std::vector<double>& r,
                  const std::vector<double>& t, std::int64_t p, std::int64_t q);

double score(const ScorerConfig& cfg, const std::vector<double>& h,
             const std::vector<double>& r, const std::vector<double>& t);

}  // namespace kge::scorers
