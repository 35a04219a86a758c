#include "delaytherm/config.hpp"

#include <cmath>
#include <set>
#include <sstream>

#include <json.hpp>

namespace delaytherm {

using nlohmann::json;

namespace {

void reject_unknown_keys(const json& obj, const std::string& prefix,
                         const std::set<std::string>& allowed) {
  for (const auto& [key, value] : obj.items()) {
    (void)value;
    if (!allowed.count(key)) {
      throw ConfigError("unknown key `" + prefix + key + "`");
    }
  }
}

double require_number(const json& obj, const std::string& prefix, const std::string& key) {
  if (!obj.contains(key)) throw ConfigError("missing key `" + prefix + key + "`");
  if (!obj[key].is_number()) throw ConfigError("`" + prefix + key + "` must be a number");
  return obj[key].get<double>();
}

double number_or(const json& obj, const std::string& prefix, const std::string& key,
                 double fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_number()) throw ConfigError("`" + prefix + key + "` must be a number");
  return obj[key].get<double>();
}

DataSpec parse_data_entry(const json& obj, const std::string& prefix, bool is_prehistory,
                          bool is_forcing) {
  if (!obj.is_object()) throw ConfigError("`" + prefix + "` must be an object");
  if (!obj.contains("kind")) throw ConfigError("missing key `" + prefix + "kind`");
  const std::string kind = obj["kind"].get<std::string>();
  DataSpec d;
  if (kind == "zero") {
    reject_unknown_keys(obj, prefix, {"kind"});
    d.kind = DataSpec::Kind::Zero;
  } else if (kind == "constant") {
    if (!is_prehistory) {
      throw ConfigError("`" + prefix + "kind`: `constant` is only valid for the prehistory");
    }
    reject_unknown_keys(obj, prefix, {"kind"});
    d.kind = DataSpec::Kind::ConstantInitial;
  } else if (kind == "single_mode") {
    reject_unknown_keys(obj, prefix, {"kind", "n", "amplitude"});
    d.kind = DataSpec::Kind::SingleMode;
    if (!obj.contains("n") || !obj["n"].is_number_unsigned()) {
      throw ConfigError("`" + prefix + "n` must be a non-negative integer");
    }
    d.mode = obj["n"].get<std::size_t>();
    if (!obj.contains("amplitude") || !obj["amplitude"].is_array() ||
        obj["amplitude"].size() != 3) {
      throw ConfigError("`" + prefix + "amplitude` must be an array of 3 numbers");
    }
    for (std::size_t k = 0; k < 3; ++k) d.amplitude[k] = obj["amplitude"][k].get<double>();
  } else if (kind == "gaussian_bump") {
    if (is_prehistory) {
      throw ConfigError("`" + prefix + "kind`: a bump prehistory is not supported; use "
                        "`constant`, `zero`, `single_mode` or `modal`");
    }
    reject_unknown_keys(obj, prefix, {"kind", "center", "width", "amplitude", "component"});
    d.kind = DataSpec::Kind::GaussianBump;
    d.center = require_number(obj, prefix, "center");
    d.width = require_number(obj, prefix, "width");
    d.bump_amplitude = require_number(obj, prefix, "amplitude");
    if (!obj.contains("component") || !obj["component"].is_number_integer()) {
      throw ConfigError("`" + prefix + "component` must be 1, 2 or 3");
    }
    const int comp = obj["component"].get<int>();
    if (comp < 1 || comp > 3) throw ConfigError("`" + prefix + "component` must be 1, 2 or 3");
    d.component = comp - 1;
  } else if (kind == "modal") {
    reject_unknown_keys(obj, prefix, {"kind", "coefficients"});
    d.kind = DataSpec::Kind::Modal;
    if (!obj.contains("coefficients") || !obj["coefficients"].is_array()) {
      throw ConfigError("`" + prefix + "coefficients` must be an array of [3]-number rows");
    }
    for (const auto& row : obj["coefficients"]) {
      if (!row.is_array() || row.size() != 3) {
        throw ConfigError("`" + prefix + "coefficients` rows must hold 3 numbers");
      }
      d.modal.push_back({row[0].get<double>(), row[1].get<double>(), row[2].get<double>()});
    }
  } else {
    throw ConfigError("`" + prefix + "kind`: unknown kind `" + kind + "`");
  }
  (void)is_forcing;
  return d;
}

}  // namespace

ParsedConfig parse_config(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config root must be an object");
  reject_unknown_keys(doc, "", {"physical", "run", "data"});

  ParsedConfig out;
  if (!doc.contains("physical")) throw ConfigError("missing key `physical`");
  const json& phys = doc["physical"];
  if (!phys.is_object()) throw ConfigError("`physical` must be an object");
  reject_unknown_keys(phys, "physical.",
                      {"rho", "bulk", "shear", "alpha", "kappa", "c_rho", "theta0", "l"});
  out.spec.physical.rho = require_number(phys, "physical.", "rho");
  out.spec.physical.bulk = require_number(phys, "physical.", "bulk");
  out.spec.physical.shear = require_number(phys, "physical.", "shear");
  out.spec.physical.alpha = require_number(phys, "physical.", "alpha");
  out.spec.physical.kappa = require_number(phys, "physical.", "kappa");
  out.spec.physical.c_rho = require_number(phys, "physical.", "c_rho");
  out.spec.physical.theta0 = require_number(phys, "physical.", "theta0");
  out.spec.physical.l = require_number(phys, "physical.", "l");

  if (!doc.contains("run")) throw ConfigError("missing key `run`");
  const json& run = doc["run"];
  if (!run.is_object()) throw ConfigError("`run` must be an object");
  reject_unknown_keys(run, "run.", {"tau", "horizon", "n_modes", "dt", "dx", "tau_list"});
  out.spec.tau = require_number(run, "run.", "tau");
  if (!(out.spec.tau > 0.0)) throw ConfigError("tau must be > 0");
  out.spec.horizon = require_number(run, "run.", "horizon");
  if (run.contains("n_modes")) {
    if (!run["n_modes"].is_number_unsigned() || run["n_modes"].get<std::size_t>() < 1) {
      throw ConfigError("`run.n_modes` must be a positive integer");
    }
    out.spec.n_modes = run["n_modes"].get<std::size_t>();
  } else {
    out.spec.n_modes = 32;
  }
  out.spec.grids.dt = number_or(run, "run.", "dt", 0.0);
  if (run.contains("dx")) {
    const double dx = require_number(run, "run.", "dx");
    if (!(dx > 0.0)) throw ConfigError("`run.dx` must be > 0");
    out.spec.grids.n_x =
        std::max<std::size_t>(7, static_cast<std::size_t>(std::lround(out.spec.physical.l / dx)) + 1);
    out.dx_given = true;
  } else {
    out.spec.grids.n_x = 257;
  }
  if (run.contains("tau_list")) {
    if (!run["tau_list"].is_array()) throw ConfigError("`run.tau_list` must be an array");
    for (const auto& v : run["tau_list"]) out.tau_list.push_back(v.get<double>());
  }

  if (!doc.contains("data")) throw ConfigError("missing key `data`");
  const json& data = doc["data"];
  if (!data.is_object()) throw ConfigError("`data` must be an object");
  reject_unknown_keys(data, "data.", {"initial", "prehistory", "forcing"});
  out.spec.initial = data.contains("initial")
                         ? parse_data_entry(data["initial"], "data.initial.", false, false)
                         : DataSpec{};
  if (data.contains("prehistory")) {
    out.spec.prehistory = parse_data_entry(data["prehistory"], "data.prehistory.", true, false);
  } else {
    out.spec.prehistory.kind = DataSpec::Kind::ConstantInitial;
  }
  out.spec.forcing = data.contains("forcing")
                         ? parse_data_entry(data["forcing"], "data.forcing.", false, true)
                         : DataSpec{};
  return out;
}

ProblemSpec finalize_spec(ParsedConfig parsed, const RunConfig& run) {
  ProblemSpec spec = std::move(parsed.spec);
  if (run.n_modes) spec.n_modes = *run.n_modes;
  if (run.tau) spec.tau = *run.tau;
  if (run.horizon) spec.horizon = *run.horizon;
  if (run.dt) spec.grids.dt = *run.dt;
  if (run.dx) {
    if (!(*run.dx > 0.0)) throw ConfigError("--dx must be > 0");
    spec.grids.n_x = std::max<std::size_t>(
        7, static_cast<std::size_t>(std::lround(spec.physical.l / *run.dx)) + 1);
  }
  try {
    return validate_problem(std::move(spec));
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
}

namespace {

json data_entry_to_json(const DataSpec& d) {
  json obj;
  switch (d.kind) {
    case DataSpec::Kind::Zero:
      obj["kind"] = "zero";
      break;
    case DataSpec::Kind::ConstantInitial:
      obj["kind"] = "constant";
      break;
    case DataSpec::Kind::SingleMode:
      obj["kind"] = "single_mode";
      obj["n"] = d.mode;
      obj["amplitude"] = {d.amplitude[0], d.amplitude[1], d.amplitude[2]};
      break;
    case DataSpec::Kind::GaussianBump:
      obj["kind"] = "gaussian_bump";
      obj["center"] = d.center;
      obj["width"] = d.width;
      obj["amplitude"] = d.bump_amplitude;
      obj["component"] = d.component + 1;
      break;
    case DataSpec::Kind::Modal: {
      obj["kind"] = "modal";
      json rows = json::array();
      for (const auto& r : d.modal) rows.push_back({r[0], r[1], r[2]});
      obj["coefficients"] = rows;
      break;
    }
    case DataSpec::Kind::Evaluator:
      throw InputError("evaluator data cannot be written to a config file");
  }
  return obj;
}

}  // namespace

std::string spec_to_config_json(const ProblemSpec& spec, const std::vector<double>& tau_list) {
  json doc;
  doc["physical"] = {{"rho", spec.physical.rho},     {"bulk", spec.physical.bulk},
                     {"shear", spec.physical.shear}, {"alpha", spec.physical.alpha},
                     {"kappa", spec.physical.kappa}, {"c_rho", spec.physical.c_rho},
                     {"theta0", spec.physical.theta0}, {"l", spec.physical.l}};
  doc["run"] = {{"tau", spec.tau},
                {"horizon", spec.horizon},
                {"n_modes", spec.n_modes},
                {"dt", resolved_dt(spec)},
                {"dx", spec.physical.l / static_cast<double>(spec.grids.n_x - 1)}};
  if (!tau_list.empty()) doc["run"]["tau_list"] = tau_list;
  doc["data"] = {{"initial", data_entry_to_json(spec.initial)},
                 {"prehistory", data_entry_to_json(spec.prehistory)},
                 {"forcing", data_entry_to_json(spec.forcing)}};
  return doc.dump(2);
}

}  // namespace delaytherm
