// JSON views of the library's result types, plus the run-report envelope the
// CLI writes. Complex numbers serialize as [re, im]; matrices as row-major
// nested arrays; block matrices carry their shape alongside the blocks.
#pragma once

#include "qsc/block_matrix.hpp"
#include "qsc/conversion.hpp"
#include "qsc/diagrams.hpp"
#include "qsc/modelspec.hpp"
#include "qsc/unitarity.hpp"
#include "qsc/wong_zakai.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <string>

namespace qsc {

// Insertion-ordered so emitted documents are byte-stable for fixed inputs.
using Json = nlohmann::ordered_json;

Json to_json(Complex z);
Json to_json(const Matrix& m);
Json to_json(const BlockMatrix& b);
Json to_json(const Conversion& c);
Json to_json(const OpticalReport& r);
Json to_json(const UnitarityResiduals& r);
Json to_json(const HPExtraction& x);
Json to_json(const ValidationReport& rep);
Json to_json(const SweepRow& row);
Json to_json(const SweepResult& s);
Json to_json(const PrelimitElement& p);
Json to_json(const SeriesSum& s);
Json to_json(const ReducedPropagator& k);

// FNV-1a 64-bit content hash, reported as 16 lowercase hex digits.
std::uint64_t fnv1a64(const std::string& bytes);
std::string hex_digest(std::uint64_t value);

// Envelope for one CLI invocation.
struct RunReport {
    std::string subcommand;
    std::string input_digest;
    std::uint64_t seed = 0;
    Json results;
};
Json to_json(const RunReport& r);

// Pretty-printed with a trailing newline; throws std::runtime_error on failure.
void write_json_file(const std::string& path, const Json& j);

}  // namespace qsc
