#pragma once

#include <cstdint>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "flexpoly/core.hpp"
#include "flexpoly/disaggregate.hpp"
#include "flexpoly/optimize.hpp"

namespace flexpoly {

// File-level failures (missing files, unparsable content) are IoError;
// well-formed files carrying inconsistent data raise ValidationError.
// The CLI maps them to distinct exit codes.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {

inline nlohmann::json encode_extended(double v) {
  if (v == kInf) return "inf";
  if (v == -kInf) return "-inf";
  return v;
}

inline double decode_extended(const nlohmann::json& j, const std::string& where) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "inf") return kInf;
    if (s == "-inf") return -kInf;
  }
  throw ValidationError("expected number or \"inf\"/\"-inf\" in " + where);
}

inline std::vector<double> decode_extended_array(const nlohmann::json& j, const std::string& where) {
  if (!j.is_array()) throw ValidationError(where + " must be an array");
  std::vector<double> out;
  out.reserve(j.size());
  for (const auto& e : j) out.push_back(decode_extended(e, where));
  return out;
}

inline std::vector<double> decode_number_array(const nlohmann::json& j, const std::string& where) {
  if (!j.is_array()) throw ValidationError(where + " must be an array");
  std::vector<double> out;
  out.reserve(j.size());
  for (const auto& e : j) {
    if (!e.is_number()) throw ValidationError(where + " must contain numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

inline nlohmann::json parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw IoError("cannot parse " + path + ": " + e.what());
  }
  return j;
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << content;
  if (!out) throw IoError("write failed for " + path);
}

}  // namespace detail

inline nlohmann::json population_to_json(const Population& pop) {
  nlohmann::json devices = nlohmann::json::array();
  for (const auto& d : pop.devices) {
    nlohmann::json params;
    auto encode_seq = [](const std::vector<double>& v) {
      nlohmann::json arr = nlohmann::json::array();
      for (double x : v) arr.push_back(detail::encode_extended(x));
      return arr;
    };
    params["u_lo"] = encode_seq(d.params.u_lo);
    params["u_hi"] = encode_seq(d.params.u_hi);
    params["x_lo"] = encode_seq(d.params.x_lo);
    params["x_hi"] = encode_seq(d.params.x_hi);
    devices.push_back({{"id", d.id}, {"kind", to_string(d.kind)}, {"params", params}});
  }
  return {{"horizon", {{"T", pop.horizon}}}, {"devices", devices}};
}

inline Population population_from_json(const nlohmann::json& j) {
  Population pop;
  try {
    pop.horizon = j.at("horizon").at("T").get<int>();
    for (const auto& dj : j.at("devices")) {
      Device d;
      d.id = dj.at("id").get<std::string>();
      d.kind = device_kind_from_string(dj.at("kind").get<std::string>());
      const auto& pj = dj.at("params");
      d.params.u_lo = detail::decode_extended_array(pj.at("u_lo"), "u_lo");
      d.params.u_hi = detail::decode_extended_array(pj.at("u_hi"), "u_hi");
      d.params.x_lo = detail::decode_extended_array(pj.at("x_lo"), "x_lo");
      d.params.x_hi = detail::decode_extended_array(pj.at("x_hi"), "x_hi");
      pop.devices.push_back(std::move(d));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed population: ") + e.what());
  }
  try {
    check_population(pop);
    for (const auto& d : pop.devices) {
      const auto v = validate(d.params);
      if (!v.ok()) throw std::invalid_argument("device " + d.id + ": " + v.detail);
    }
  } catch (const std::invalid_argument& e) {
    throw ValidationError(e.what());
  }
  return pop;
}

inline void save_population(const Population& pop, const std::string& path) {
  detail::write_file(path, population_to_json(pop).dump(2) + "\n");
}

inline Population load_population(const std::string& path) {
  return population_from_json(detail::parse_file(path));
}

inline void save_coupling(const CouplingConstraints& c, const std::string& path) {
  nlohmann::json j{{"C", c.rows}, {"d", c.rhs}};
  detail::write_file(path, j.dump(2) + "\n");
}

inline CouplingConstraints load_coupling(const std::string& path) {
  const nlohmann::json j = detail::parse_file(path);
  CouplingConstraints c;
  try {
    for (const auto& row : j.at("C")) c.rows.push_back(detail::decode_number_array(row, "C row"));
    c.rhs = detail::decode_number_array(j.at("d"), "d");
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed coupling file: ") + e.what());
  }
  if (c.rows.size() != c.rhs.size()) throw ValidationError("coupling: C and d sizes differ");
  return c;
}

struct SolveArtifact {
  Profile u_star;
  double objective = 0;
  std::vector<Atom> atoms;
  std::int64_t timing_us = 0;
};

inline nlohmann::json result_to_json(const SolveArtifact& r) {
  nlohmann::json atoms = nlohmann::json::array();
  for (const auto& a : r.atoms)
    atoms.push_back({{"lambda", a.weight},
                     {"permutation", a.vertex.label.order},
                     {"vertex", a.vertex.u}});
  return {{"u_star", r.u_star},
          {"objective", r.objective},
          {"atoms", atoms},
          {"timing_us", r.timing_us}};
}

inline void save_result(const SolveArtifact& r, const std::string& path) {
  detail::write_file(path, result_to_json(r).dump(2) + "\n");
}

inline SolveArtifact load_result(const std::string& path) {
  const nlohmann::json j = detail::parse_file(path);
  SolveArtifact r;
  try {
    r.u_star = detail::decode_number_array(j.at("u_star"), "u_star");
    r.objective = j.at("objective").get<double>();
    r.timing_us = j.at("timing_us").get<std::int64_t>();
    for (const auto& aj : j.at("atoms")) {
      Atom a;
      a.weight = aj.at("lambda").get<double>();
      a.vertex.label.order = aj.at("permutation").get<std::vector<int>>();
      a.vertex.u = detail::decode_number_array(aj.at("vertex"), "vertex");
      r.atoms.push_back(std::move(a));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed result file: ") + e.what());
  }
  return r;
}

struct PriceRow {
  int day = 0;
  int step = 0;
  double price = 0;
};

inline std::vector<PriceRow> load_prices(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw ValidationError("price file is empty: " + path);
  if (line != "day,t,price" && line != "day,t,price\r")
    throw ValidationError("price file must start with header day,t,price");
  std::vector<PriceRow> rows;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    std::istringstream ss(line);
    PriceRow r;
    char c1 = 0, c2 = 0;
    if (!(ss >> r.day >> c1 >> r.step >> c2 >> r.price) || c1 != ',' || c2 != ',')
      throw ValidationError("bad price row at line " + std::to_string(lineno));
    if (!std::isfinite(r.price)) throw ValidationError("non-finite price at line " + std::to_string(lineno));
    rows.push_back(r);
  }
  return rows;
}

inline void save_prices(const std::vector<PriceRow>& rows, const std::string& path) {
  std::ostringstream out;
  out << "day,t,price\n";
  char buf[64];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%d,%d,%.12g\n", r.day, r.step, r.price);
    out << buf;
  }
  detail::write_file(path, out.str());
}

// Per-device schedule rows, then the verification report as '#' comment
// lines so plain CSV consumers can skip them.
inline void save_schedule_csv(const std::vector<DeviceSchedule>& schedules,
                              const VerificationReport& report, const std::string& path) {
  std::ostringstream out;
  out << "device_id,t,power\n";
  char buf[64];
  for (const auto& s : schedules)
    for (std::size_t t = 0; t < s.u.size(); ++t) {
      std::snprintf(buf, sizeof buf, ",%zu,%.17g\n", t + 1, s.u[t]);
      out << s.id << buf;
    }
  std::snprintf(buf, sizeof buf, "%.3e", report.residual);
  out << "# residual_inf," << buf << "\n";
  out << "# violations," << report.violations.size() << "\n";
  for (const auto& v : report.violations) {
    std::snprintf(buf, sizeof buf, "%.3e", v.magnitude);
    out << "# violation," << (v.device_id.empty() ? "<aggregate>" : v.device_id) << "," << v.kind
        << "," << buf << "\n";
  }
  detail::write_file(path, out.str());
}

}  // namespace flexpoly
