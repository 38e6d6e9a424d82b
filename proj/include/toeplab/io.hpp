#pragma once

#include "toeplab/canonical_model.hpp"
#include "toeplab/hardy_sphere.hpp"
#include "toeplab/inverse.hpp"
#include "toeplab/multiindex.hpp"
#include "toeplab/reduction.hpp"
#include "toeplab/spectral.hpp"
#include "toeplab/toric.hpp"

#include <json.hpp>

#include <ostream>
#include <string>

namespace toeplab {

using Json = nlohmann::ordered_json;

/// Shortest round-trip decimal form; "nan"/"inf" for non-finite values.
std::string format_double(double x);

/// Parsers throw ValidationError naming `path` and the offending field.
SubtorusData subtorus_from_json(const Json& j, const std::string& path = "subtorus");
Json to_json(const SubtorusData& sub);

SymbolPoly symbol_poly_from_json(const Json& j, std::size_t n, const std::string& path = "symbol");
Json to_json(const SymbolPoly& symbol);

/// {"terms": [{"gamma": [int], "coeff": number | "p/q"}]}
InvariantSymbol invariant_symbol_from_json(const Json& j, std::size_t n, const std::string& path = "symbol");
Json to_json(const InvariantSymbol& symbol);

/// A JSON rational: integer, float (read exactly) or a "p/q" / decimal string.
Rational rational_from_json(const Json& j, const std::string& path);

Json to_json(const AsymptoticFit& fit);
Json to_json(const McEstimate& mc);
Json to_json(const IsometryReport& report);
Json to_json(const RegularFreeReport& report);
Json to_json(const DistinguishReport& report);

void write_block_csv(std::ostream& out, const ToeplitzBlock& block);
void write_spectrum_csv(std::ostream& out, const EquivariantSpectrum& spec, bool header = true);
void write_reconstruction_csv(std::ostream& out, const Reconstruction& rec, std::size_t n, bool header = true);

}  // namespace toeplab
