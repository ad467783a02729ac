#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "states.hpp"

namespace ncvar {

using json = nlohmann::json;

class SpecError : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

namespace detail {

inline Complex complex_from_json(const json& j, const std::string& where) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) {
    return {j[0].get<double>(), j[1].get<double>()};
  }
  throw SpecError(where + ": expected a number or [re, im]");
}

inline json complex_to_json(Complex z) {
  if (z.imag() == 0.0) return z.real();
  return json::array({z.real(), z.imag()});
}

template <typename T>
T scalar_from_json(const json& j, const std::string& where) {
  if constexpr (std::is_same_v<T, int>) {
    if (!j.is_number_integer()) throw SpecError(where + ": expected an integer");
    return j.get<int>();
  } else {
    if (!j.is_number()) throw SpecError(where + ": expected a number");
    return j.get<double>();
  }
}

// A per-mode field: a scalar for one mode, an array of `modes` entries otherwise.
template <typename T, typename F>
std::vector<T> per_mode(const json& j, int modes, const std::string& where, F one) {
  if (modes == 1 && !j.is_array()) return {one(j, where)};
  if (modes == 1 && j.is_array() && j.size() == 2 && std::is_same_v<T, Complex> && j[0].is_number()) {
    return {one(j, where)};
  }
  if (!j.is_array() || static_cast<int>(j.size()) != modes) {
    throw SpecError(where + ": expected " + std::to_string(modes) + " entries");
  }
  std::vector<T> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(one(j[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

inline std::set<std::string> allowed_state_keys(StateKind k) {
  switch (k) {
    case StateKind::vacuum: return {"kind"};
    case StateKind::coherent: return {"kind", "alpha"};
    case StateKind::fock: return {"kind", "n"};
    case StateKind::cat: return {"kind", "alpha", "parity"};
    case StateKind::decohered_cat: return {"kind", "alpha", "gamma"};
    case StateKind::noon: return {"kind", "n"};
    case StateKind::entangled_coherent: return {"kind", "alpha", "parity"};
    case StateKind::squeezed_vacuum: return {"kind", "r", "theta"};
    case StateKind::thermal: return {"kind", "nbar"};
    case StateKind::squeezed_thermal: return {"kind", "r", "theta", "nbar"};
    case StateKind::squeezed_coherent: return {"kind", "r", "theta", "alpha"};
    case StateKind::photon_added_coherent: return {"kind", "alpha"};
    case StateKind::fock_plus_coherent: return {"kind", "n", "alpha"};
    case StateKind::mixture: return {"kind", "weights", "components"};
  }
  return {};
}

inline StateSpec state_from_json(const json& st, int modes, const std::vector<int>& cutoffs,
                                 const std::string& where) {
  if (!st.is_object()) throw SpecError(where + ": expected an object");
  if (!st.contains("kind") || !st["kind"].is_string()) throw SpecError(where + ".kind: missing or not a string");
  std::string name = st["kind"].get<std::string>();
  auto kind = kind_from_name(name);
  if (!kind) throw SpecError(where + ".kind: unknown state kind '" + name + "'");
  auto allowed = allowed_state_keys(*kind);
  for (const auto& [key, _] : st.items()) {
    if (!allowed.count(key)) throw SpecError(where + ": unknown key '" + key + "' for kind " + name);
  }
  auto need = [&](const char* key) -> const json& {
    if (!st.contains(key)) throw SpecError(where + ": missing '" + key + "' for kind " + name);
    return st[key];
  };
  auto path = [&](const char* key) { return where + "." + key; };
  auto cplx = [](const json& j, const std::string& w) { return complex_from_json(j, w); };
  auto real = [](const json& j, const std::string& w) { return scalar_from_json<double>(j, w); };
  auto integer = [](const json& j, const std::string& w) { return scalar_from_json<int>(j, w); };

  StateSpec s;
  s.kind = *kind;
  s.modes = modes;
  s.cutoffs = cutoffs;
  if (st.contains("alpha")) s.alpha = per_mode<Complex>(st["alpha"], modes, path("alpha"), cplx);
  if (st.contains("r")) s.r = real(st["r"], path("r"));
  if (st.contains("theta")) s.theta = real(st["theta"], path("theta"));
  if (st.contains("gamma")) s.gamma = real(st["gamma"], path("gamma"));
  if (st.contains("nbar")) s.nbar = per_mode<double>(st["nbar"], modes, path("nbar"), real);
  if (st.contains("parity")) {
    const json& p = st["parity"];
    if (p == "even") {
      s.parity = Parity::even;
    } else if (p == "odd") {
      s.parity = Parity::odd;
    } else {
      throw SpecError(path("parity") + ": expected \"even\" or \"odd\"");
    }
  }
  switch (s.kind) {
    case StateKind::noon:
    case StateKind::fock_plus_coherent:
      s.n = {integer(need("n"), path("n"))};
      break;
    case StateKind::fock:
      s.n = per_mode<int>(need("n"), modes, path("n"), integer);
      break;
    case StateKind::coherent:
    case StateKind::cat:
    case StateKind::decohered_cat:
    case StateKind::entangled_coherent:
    case StateKind::squeezed_coherent:
    case StateKind::photon_added_coherent:
      need("alpha");
      break;
    case StateKind::mixture: {
      const json& w = need("weights");
      const json& c = need("components");
      if (!w.is_array() || !c.is_array() || w.size() != c.size() || c.empty()) {
        throw SpecError(where + ": weights and components must be nonempty arrays of equal length");
      }
      for (std::size_t i = 0; i < w.size(); ++i) {
        s.weights.push_back(real(w[i], path("weights") + "[" + std::to_string(i) + "]"));
        s.components.push_back(
            state_from_json(c[i], modes, cutoffs, path("components") + "[" + std::to_string(i) + "]"));
      }
      break;
    }
    default:
      break;
  }
  if (s.kind == StateKind::decohered_cat) need("gamma");
  if (s.kind == StateKind::squeezed_vacuum || s.kind == StateKind::squeezed_thermal ||
      s.kind == StateKind::squeezed_coherent) {
    need("r");
  }
  if (s.kind == StateKind::thermal || s.kind == StateKind::squeezed_thermal) need("nbar");
  return s;
}

inline json state_to_json(const StateSpec& s) {
  json j;
  j["kind"] = kind_name(s.kind);
  auto alpha = [&] {
    if (s.modes == 1 && s.alpha.size() == 1) return complex_to_json(s.alpha[0]);
    json a = json::array();
    for (auto z : s.alpha) a.push_back(complex_to_json(z));
    return a;
  };
  auto nbar = [&] {
    if (s.modes == 1 && s.nbar.size() == 1) return json(s.nbar[0]);
    return json(s.nbar);
  };
  const char* parity = s.parity == Parity::even ? "even" : "odd";
  switch (s.kind) {
    case StateKind::vacuum:
      break;
    case StateKind::coherent:
    case StateKind::photon_added_coherent:
      j["alpha"] = alpha();
      break;
    case StateKind::fock:
      j["n"] = s.modes == 1 ? json(s.n[0]) : json(s.n);
      break;
    case StateKind::cat:
    case StateKind::entangled_coherent:
      j["alpha"] = alpha();
      j["parity"] = parity;
      break;
    case StateKind::decohered_cat:
      j["alpha"] = alpha();
      j["gamma"] = s.gamma;
      break;
    case StateKind::noon:
      j["n"] = s.n[0];
      break;
    case StateKind::squeezed_vacuum:
      j["r"] = s.r;
      j["theta"] = s.theta;
      break;
    case StateKind::thermal:
      j["nbar"] = nbar();
      break;
    case StateKind::squeezed_thermal:
      j["r"] = s.r;
      j["theta"] = s.theta;
      j["nbar"] = nbar();
      break;
    case StateKind::squeezed_coherent:
      j["r"] = s.r;
      j["theta"] = s.theta;
      j["alpha"] = alpha();
      break;
    case StateKind::fock_plus_coherent:
      j["n"] = s.n[0];
      j["alpha"] = alpha();
      break;
    case StateKind::mixture:
      j["weights"] = s.weights;
      j["components"] = json::array();
      for (const auto& c : s.components) j["components"].push_back(state_to_json(c));
      break;
  }
  return j;
}

}  // namespace detail

// {"modes": int, "cutoff": int | [int], "state": {"kind": ..., ...}}. Unknown
// keys anywhere are rejected; theta defaults to 0 when omitted.
inline StateSpec spec_from_json(const json& j) {
  if (!j.is_object()) throw SpecError("spec: expected a JSON object");
  for (const auto& [key, _] : j.items()) {
    if (key != "modes" && key != "cutoff" && key != "state") throw SpecError("spec: unknown key '" + key + "'");
  }
  if (!j.contains("modes") || !j.contains("cutoff") || !j.contains("state")) {
    throw SpecError("spec: 'modes', 'cutoff' and 'state' are required");
  }
  int modes = detail::scalar_from_json<int>(j["modes"], "modes");
  if (modes < 1) throw SpecError("modes: must be positive");
  std::vector<int> cutoffs;
  if (j["cutoff"].is_array()) {
    if (static_cast<int>(j["cutoff"].size()) != modes) throw SpecError("cutoff: need one entry per mode");
    for (const auto& c : j["cutoff"]) cutoffs.push_back(detail::scalar_from_json<int>(c, "cutoff"));
  } else {
    cutoffs.assign(modes, detail::scalar_from_json<int>(j["cutoff"], "cutoff"));
  }
  StateSpec s = detail::state_from_json(j["state"], modes, cutoffs, "state");
  try {
    s.validate();
  } catch (const InvalidArgument& e) {
    throw SpecError(std::string("state: ") + e.what());
  }
  return s;
}

inline StateSpec spec_from_string(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw SpecError(std::string("spec is not valid JSON: ") + e.what());
  }
  return spec_from_json(j);
}

inline json spec_to_json(const StateSpec& s) {
  json j;
  j["modes"] = s.modes;
  bool uniform = std::all_of(s.cutoffs.begin(), s.cutoffs.end(), [&](int c) { return c == s.cutoffs[0]; });
  j["cutoff"] = uniform ? json(s.cutoffs[0]) : json(s.cutoffs);
  j["state"] = detail::state_to_json(s);
  return j;
}

// Keys are sorted by nlohmann::json, so dump() is canonical.
inline std::string canonical_json(const StateSpec& s) { return spec_to_json(s).dump(); }

inline std::string fnv1a_hex(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

inline std::string spec_hash(const StateSpec& s) { return fnv1a_hex(canonical_json(s)); }

}  // namespace ncvar
