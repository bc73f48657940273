#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "cstrata/artin_schreier.hpp"
#include "cstrata/crystal.hpp"
#include "cstrata/family_strata.hpp"

namespace cstrata::cli {

using json = nlohmann::ordered_json;

/// Malformed input, located by a JSON pointer into the document.
class InputError : public std::runtime_error {
 public:
  InputError(std::string pointer, const std::string& what) : std::runtime_error(what), pointer_(std::move(pointer)) {}
  const std::string& pointer() const { return pointer_; }

 private:
  std::string pointer_;
};

json load_json(const std::string& path);

FieldPtr parse_field(const json& doc);
Crystal parse_crystal(const json& doc);
CrystalFamily parse_family(const json& doc);
ASSystem parse_system(const json& doc);

/// "t=3", "t1=3,t2=0": enumeration indices of coordinates in F_{q^m}.
std::vector<FFElem> parse_point(const std::string& text, int params, const FieldPtr& field);

json field_json(const FiniteField& f);
json witt_json(const WittElement& x);
json matrix_json(const WittMatrix& m);
json crystal_json(const Crystal& c);
json polygon_json(const NewtonPolygon& nu);
json counts_json(const std::vector<u64>& counts);

}  // namespace cstrata::cli
