#pragma once

// JSON and CSV serialization. Output is canonical: object keys sorted,
// doubles printed with 17 significant digits, so equal reports give equal
// bytes.

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "bklab/dyadic.hpp"
#include "bklab/kernel.hpp"
#include "bklab/search.hpp"
#include "bklab/step_function.hpp"
#include "bklab/transforms.hpp"
#include "bklab/verify.hpp"

namespace bklab {

using Json = nlohmann::json;

/// "%.17g"; non-finite values print as null in JSON and as nan/inf in CSV.
std::string format_double(double v);

/// Pretty-printed canonical JSON with a trailing newline.
std::string canonical_json(const Json& j);

Json to_json(const Node& n);
Json to_json(const DyadicPoint& p);
Json to_json(const BellmanParams& p);
Json to_json(const InequalityGap& g);
Json to_json(const EigenResidual& r);
Json to_json(const ExcessSet& e);
Json to_json(const Moments& m);
Json to_json(const SearchReport& r);
Json to_json(const StudyResult& s);
Json to_json(const SuiteSummary& s);
Json to_json(const GPhiResult& g);

/// Array of {start, end, value}; endpoints are {num, den_pow} meaning
/// num / m^den_pow in lowest terms. Rational values are "p/q" strings.
Json to_json(const StepFunctionD& phi);
Json to_json(const StepFunctionQ& phi);

Json to_json(const Linearization<double>& lin);
Json to_json(const Linearization<Rational>& lin);

/// Accepts the array form (branching taken from `m`) or {"m": .., "pieces": [..]}.
/// Values may be numbers or "p/q" strings. Throws DomainError on malformed input.
StepFunctionD step_function_from_json(const Json& j, int m = 2);
StepFunctionQ rational_step_function_from_json(const Json& j, int m = 2);

Rational parse_rational(const std::string& s);
std::string format_rational(const Rational& r);

/// Header "N,objective,bound,gap,residual,k,B_over_k".
std::string study_csv(const StudyResult& s);
/// Header "inequality,phi_id,family_id,beta,lhs,rhs,slack".
std::string gap_rows_csv(const std::vector<GapRow>& rows);

/// Throw IoError on failure.
std::string read_text(const std::string& path);
void write_text(const std::string& path, const std::string& text);

}  // namespace bklab
