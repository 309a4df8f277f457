#pragma once

// Batch driver: theorem verification, classification, conjecture evidence and
// oracle comparison, all producing JSON reports.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "json.hpp"
#include "modinv/constructions.hpp"

namespace modinv::harness {

using json = nlohmann::json;

struct Options {
  std::uint32_t p = 3;
  std::uint32_t r = 0;       // 0 selects the theorem's default rank
  std::uint32_t k = 6;       // degree of the specialization field over F_p
  std::uint32_t trials = 5;
  std::uint64_t seed = 1;
  bool timings = false;
};

const std::vector<std::string>& supported_theorems();

/// Throws UnknownTheorem, PreconditionUnmet.
json verify(const std::string& theorem, const Options& opt);
json classify(const json& job, bool timings = false);
json conjecture(const Options& opt);
json oracle(const json& job, std::uint32_t max_degree);

bool passed(const json& report);
std::string render_text(const json& report);

// ---- serialization --------------------------------------------------------

/// {"p": p, "k": k, "modulus": [...]} (modulus optional on input).
const GaloisField& field_from_json(const json& j);
json field_json(const GaloisField& F);
/// Elements are packed indices sum a_i p^i, or residue arrays on input.
Fq element_from_json(const GaloisField& F, const json& j);
json element_json(const Fq& a);
json poly_json(const PolyF& f);
PolyF poly_from_json(const json& j, const VarContext& ctx, FieldRef R);
json case_json(const CaseResult& r);

/// Re-expands every serialized relation of a classify/verify case and checks
/// the serialized generators for invariance under the serialized input.
bool recheck_case(const json& case_report, const GaloisField& F);

// ---- sampling -------------------------------------------------------------

/// Strata: rank2-generic, rank2-g13zero, rank2-g12zero, rank2-unfaithful,
/// rank3-generic, rank3-g135zero, rank3-g123zero, rank3-g123-135zero,
/// rank3-symsq, rank3-unfaithful, generic (any rank). A random F_p column
/// change and a random (gamma, alpha) basis change are applied before the
/// defining conditions are checked; at most 100 attempts.
Rep3 sample_stratum(const std::string& stratum, std::uint32_t p, std::uint32_t r, const GaloisField& F,
                    std::mt19937_64& rng);
Rep2 sample_faithful_w(std::uint32_t p, std::uint32_t r, const GaloisField& F, std::mt19937_64& rng);

}  // namespace modinv::harness
