#include "gsp/measure_io.hpp"

#include <cstdint>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace gsp {

namespace {

using nlohmann::json;

const char* form_name(SegmentForm f) {
  switch (f) {
    case SegmentForm::Constant: return "constant";
    case SegmentForm::Power: return "power";
    case SegmentForm::ExpWell: return "expwell";
    case SegmentForm::PowerTail: return "powertail";
    case SegmentForm::LogTail: return "logtail";
  }
  return "?";
}

SegmentForm form_from_name(const std::string& s) {
  if (s == "constant") return SegmentForm::Constant;
  if (s == "power") return SegmentForm::Power;
  if (s == "expwell") return SegmentForm::ExpWell;
  if (s == "powertail") return SegmentForm::PowerTail;
  if (s == "logtail") return SegmentForm::LogTail;
  throw std::invalid_argument("unknown segment form: " + s);
}

json measure_json(const SpectralMeasure& m) {
  json j;
  j["schema_version"] = 1;
  j["domain"] = (m.domain == Domain::IntegerTime) ? "integer" : "continuous";
  json atoms = json::array();
  for (const auto& at : m.atoms) atoms.push_back({at.freq, at.mass});
  j["atoms"] = atoms;
  json segs = json::array();
  for (const auto& s : m.segments) {
    json seg;
    if (s.unbounded()) seg["support"] = {s.a, "inf"};
    else seg["support"] = {s.a, s.b};
    seg["form"] = form_name(s.form);
    json params;
    params["c"] = s.c;
    if (s.form == SegmentForm::Power || s.form == SegmentForm::PowerTail)
      params["alpha"] = s.alpha;
    if (s.form == SegmentForm::ExpWell) params["A"] = s.A;
    seg["params"] = params;
    segs.push_back(seg);
  }
  j["segments"] = segs;
  j["normalize"] = false;
  j["delta"] = m.declared_delta;
  if (m.ac_floor) {
    j["ac_floor"] = {{"interval", {m.ac_floor->lo, m.ac_floor->hi}},
                     {"nu", m.ac_floor->nu}};
  }
  if (!m.multipliers.empty()) {
    json mults = json::array();
    for (const auto& mult : m.multipliers) {
      switch (mult.kind) {
        case Multiplier::PowerLaw: mults.push_back({{"kind", "powerlaw"}, {"p", mult.p}}); break;
        case Multiplier::OneMinusCos: mults.push_back({{"kind", "oneminuscos"}}); break;
        case Multiplier::InvOneMinusCos: mults.push_back({{"kind", "invoneminuscos"}}); break;
      }
    }
    j["multipliers"] = mults;
  }
  return j;
}

}  // namespace

std::string measure_to_json(const SpectralMeasure& m) { return measure_json(m).dump(2); }

SpectralMeasure measure_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const std::exception& e) {
    throw std::invalid_argument(std::string("measure config is not valid JSON: ") + e.what());
  }
  if (!j.contains("schema_version") || j["schema_version"].get<int>() != 1)
    throw std::invalid_argument("unsupported or missing schema_version (expected 1)");
  SpectralMeasure m;
  const std::string dom = j.at("domain").get<std::string>();
  if (dom == "integer") m.domain = Domain::IntegerTime;
  else if (dom == "continuous") m.domain = Domain::ContinuousTime;
  else throw std::invalid_argument("domain must be \"integer\" or \"continuous\"");
  if (j.contains("atoms")) {
    for (const auto& a : j["atoms"]) {
      if (!a.is_array() || a.size() != 2)
        throw std::invalid_argument("each atom must be a [location, mass] pair");
      m.atoms.push_back({a[0].get<double>(), a[1].get<double>()});
    }
  }
  if (j.contains("segments")) {
    for (const auto& s : j["segments"]) {
      DensitySegment seg;
      const auto& sup = s.at("support");
      seg.a = sup.at(0).get<double>();
      if (sup.at(1).is_string()) {
        if (sup.at(1).get<std::string>() != "inf")
          throw std::invalid_argument("segment support upper end must be a number or \"inf\"");
        seg.b = std::numeric_limits<double>::infinity();
      } else {
        seg.b = sup.at(1).get<double>();
      }
      seg.form = form_from_name(s.at("form").get<std::string>());
      const auto& p = s.at("params");
      seg.c = p.at("c").get<double>();
      if (p.contains("alpha")) seg.alpha = p["alpha"].get<double>();
      if (p.contains("A")) seg.A = p["A"].get<double>();
      m.segments.push_back(seg);
    }
  }
  if (j.contains("delta")) m.declared_delta = j["delta"].get<double>();
  if (j.contains("ac_floor")) {
    AcFloor f;
    f.lo = j["ac_floor"].at("interval").at(0).get<double>();
    f.hi = j["ac_floor"].at("interval").at(1).get<double>();
    f.nu = j["ac_floor"].at("nu").get<double>();
    m.ac_floor = f;
  }
  if (j.contains("multipliers")) {
    for (const auto& mu : j["multipliers"]) {
      const std::string kind = mu.at("kind").get<std::string>();
      if (kind == "powerlaw") m.multipliers.push_back({Multiplier::PowerLaw, mu.at("p").get<double>()});
      else if (kind == "oneminuscos") m.multipliers.push_back({Multiplier::OneMinusCos, 0.0});
      else if (kind == "invoneminuscos") m.multipliers.push_back({Multiplier::InvOneMinusCos, 0.0});
      else throw std::invalid_argument("unknown multiplier kind: " + kind);
    }
  }
  m.validate();
  if (j.value("normalize", false)) m = m.normalized();
  return m;
}

SpectralMeasure measure_from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open measure config: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return measure_from_json(ss.str());
}

std::string SpectralMeasure::digest() const {
  const std::string canon = measure_json(*this).dump();
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : canon) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

}  // namespace gsp
