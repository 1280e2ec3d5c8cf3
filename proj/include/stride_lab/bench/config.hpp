#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <toml.hpp>

#include "stride_lab/errors.hpp"
#include "stride_lab/lip_sim.hpp"
#include "stride_lab/model.hpp"
#include "stride_lab/terrain.hpp"

namespace stride_lab::bench {

enum class ScenarioKind { Track, StepTrack, Cot, PushGrid, Rough, Gaps, SweepTd, PlanOnce };

inline constexpr std::array<std::pair<ScenarioKind, std::string_view>, 8> kScenarioNames{{
    {ScenarioKind::Track, "track"},
    {ScenarioKind::StepTrack, "step-track"},
    {ScenarioKind::Cot, "cot"},
    {ScenarioKind::PushGrid, "push-grid"},
    {ScenarioKind::Rough, "rough"},
    {ScenarioKind::Gaps, "gaps"},
    {ScenarioKind::SweepTd, "sweep-td"},
    {ScenarioKind::PlanOnce, "plan-once"},
}};

[[nodiscard]] inline std::string_view to_string(ScenarioKind k) {
  for (const auto& [kind, name] : kScenarioNames) {
    if (kind == k) return name;
  }
  return "?";
}

[[nodiscard]] inline ScenarioKind scenario_from_string(std::string_view s) {
  for (const auto& [kind, name] : kScenarioNames) {
    if (name == s) return kind;
  }
  throw ValidationError("scenario", "unknown scenario '" + std::string(s) + "'");
}

[[nodiscard]] inline PlannerId planner_from_string(std::string_view s) {
  if (s == "ls") return PlannerId::LS;
  if (s == "lipm") return PlannerId::LIPM;
  throw ValidationError("planner", "expected \"ls\" or \"lipm\", got '" + std::string(s) + "'");
}

struct PushGridSpec {
  double i_max = 7.0;
  int samples = 500;
  friend bool operator==(const PushGridSpec&, const PushGridSpec&) = default;
};

struct RoughSpec {
  std::vector<double> h_max{0.0, 0.005, 0.01, 0.02, 0.03};
  int trials = 100;
  friend bool operator==(const RoughSpec&, const RoughSpec&) = default;
};

struct SweepSpec {
  std::vector<double> step_durations{0.20, 0.25, 0.30, 0.35, 0.40};
  friend bool operator==(const SweepSpec&, const SweepSpec&) = default;
};

struct TrackSpec {
  /// Duration of each velocity ramp of the trapezoidal profile.
  double ramp_s = 2.0;
  friend bool operator==(const TrackSpec&, const TrackSpec&) = default;
};

struct TerrainSpec {
  Terrain::Kind kind = Terrain::Kind::Flat;
  std::vector<GapInterval> gaps;
  double h_max = 0.02;
  std::optional<std::uint64_t> seed;
  double gap_margin = 0.02;
  double gap_window = 0.0;
  friend bool operator==(const TerrainSpec&, const TerrainSpec&) = default;
};

/// A complete benchmark run description; everything a scenario needs.
struct ScenarioConfig {
  ScenarioKind scenario = ScenarioKind::Track;
  PlannerId planner = PlannerId::LS;
  std::uint64_t seed = 1;
  /// Step budget. For `track` this is the length of the constant-velocity hold.
  int steps = 100;
  double duration_s = 0.0;
  GaitCommand command{0.5, 0.0, 0.25};
  /// Explicit command schedule; when non-empty it replaces `command`.
  std::vector<ScheduledCommand> schedule;
  int warmup_steps = 20;
  double foot_noise_sigma = 0.0;
  double velocity_noise_sigma = 0.0;
  bool balance_layer = true;
  BipedParams params;
  TerrainSpec terrain;
  std::vector<Push> pushes;
  PushGridSpec push_grid;
  RoughSpec rough;
  SweepSpec sweep;
  TrackSpec track;
  std::string out_dir = "out";
  bool emit_csv = true;
  bool emit_svg = true;

  [[nodiscard]] Terrain build_terrain() const {
    switch (terrain.kind) {
      case Terrain::Kind::Gapped:
        return Terrain::gapped(terrain.gaps);
      case Terrain::Kind::Rough:
        return Terrain::rough(terrain.h_max, terrain.seed.value_or(seed));
      case Terrain::Kind::Flat:
        break;
    }
    return Terrain::flat();
  }

  /// Simulator configuration for the primary episode of the scenario.
  [[nodiscard]] SimConfig sim() const {
    SimConfig c;
    c.params = params;
    c.planner = planner;
    c.terrain = build_terrain();
    c.schedule = schedule.empty() ? std::vector<ScheduledCommand>{{0.0, command}} : schedule;
    c.pushes = pushes;
    c.max_steps = steps;
    c.duration = duration_s;
    c.foot_noise_sigma = foot_noise_sigma;
    c.velocity_noise_sigma = velocity_noise_sigma;
    c.rng_seed = seed;
    c.gap_margin = terrain.gap_margin;
    c.gap_window = terrain.gap_window;
    c.balance_layer = balance_layer;
    return c;
  }

  void validate() const {
    params.validate();
    command.validate(params);
    if (steps < 0) throw ValidationError("steps", "must be >= 0");
    if (!(duration_s >= 0.0)) throw ValidationError("duration_s", "must be >= 0");
    if (steps == 0 && duration_s == 0.0)
      throw ValidationError("steps", "either steps or duration_s must be positive");
    if (warmup_steps < 0) throw ValidationError("warmup_steps", "must be >= 0");
    if (!(foot_noise_sigma >= 0.0)) throw ValidationError("foot_noise_sigma", "must be >= 0");
    if (!(velocity_noise_sigma >= 0.0))
      throw ValidationError("velocity_noise_sigma", "must be >= 0");
    if (!(terrain.gap_margin >= 0.0)) throw ValidationError("terrain.gap_margin", "must be >= 0");
    if (!(terrain.gap_window >= 0.0)) throw ValidationError("terrain.gap_window", "must be >= 0");
    if (!(terrain.h_max >= 0.0)) throw ValidationError("terrain.h_max", "must be >= 0");
    try {
      (void)build_terrain();
    } catch (const ConfigInvalid& e) {
      throw ValidationError("terrain.gaps", e.what());
    }
    for (const auto& sc : schedule) sc.command.validate(params);
    for (std::size_t i = 1; i < schedule.size(); ++i) {
      if (schedule[i].t_start < schedule[i - 1].t_start)
        throw ValidationError("command.t_start", "schedule must be sorted");
    }
    for (std::size_t i = 0; i < pushes.size(); ++i) {
      if (!(pushes[i].impulse >= 0.0)) throw ValidationError("push.impulse", "must be >= 0");
      if (std::abs(pushes[i].direction.norm() - 1.0) > 1e-9)
        throw ValidationError("push.direction", "must be a unit vector");
      if (i > 0 && pushes[i].t < pushes[i - 1].t)
        throw ValidationError("push.t", "pushes must be sorted by time");
    }
    if (!(push_grid.i_max > 0.0)) throw ValidationError("push_grid.i_max", "must be > 0");
    if (push_grid.samples < 1) throw ValidationError("push_grid.samples", "must be >= 1");
    if (rough.trials < 1) throw ValidationError("rough.trials", "must be >= 1");
    for (double h : rough.h_max) {
      if (!(h >= 0.0)) throw ValidationError("rough.h_max", "levels must be >= 0");
    }
    for (double td : sweep.step_durations) {
      GaitCommand probe = command;
      probe.step_duration = td;
      try {
        probe.validate(params);
      } catch (const ValidationError& e) {
        throw ValidationError("sweep.step_durations", e.what());
      }
    }
    if (!(track.ramp_s >= 0.0)) throw ValidationError("track.ramp_s", "must be >= 0");
  }

  friend bool operator==(const ScenarioConfig&, const ScenarioConfig&) = default;
};

namespace detail {

/// Reads typed keys from one TOML table and rejects keys nobody asked for.
class TableReader {
 public:
  TableReader(const toml::table& table, std::string prefix)
      : table_(table), prefix_(std::move(prefix)) {}

  void number(std::string_view key, double& out) {
    if (const auto* n = lookup(key)) {
      if (!n->is_number()) throw ValidationError(name(key), "expected a number");
      out = n->value<double>().value();
      if (!std::isfinite(out)) throw ValidationError(name(key), "must be finite");
    }
  }

  void integer(std::string_view key, int& out) {
    std::int64_t v = out;
    integer64(key, v);
    if (v < INT32_MIN || v > INT32_MAX) throw ValidationError(name(key), "out of range");
    out = static_cast<int>(v);
  }

  void integer64(std::string_view key, std::int64_t& out) {
    if (const auto* n = lookup(key)) {
      if (!n->is_integer()) throw ValidationError(name(key), "expected an integer");
      out = n->value<std::int64_t>().value();
    }
  }

  void seed(std::string_view key, std::uint64_t& out) {
    if (const auto* n = lookup(key)) {
      if (!n->is_integer() || *n->value<std::int64_t>() < 0)
        throw ValidationError(name(key), "expected a non-negative integer");
      out = static_cast<std::uint64_t>(*n->value<std::int64_t>());
    }
  }

  void boolean(std::string_view key, bool& out) {
    if (const auto* n = lookup(key)) {
      if (!n->is_boolean()) throw ValidationError(name(key), "expected true or false");
      out = *n->value<bool>();
    }
  }

  [[nodiscard]] std::optional<std::string> string(std::string_view key) {
    if (const auto* n = lookup(key)) {
      if (!n->is_string()) throw ValidationError(name(key), "expected a string");
      return *n->value<std::string>();
    }
    return std::nullopt;
  }

  void vec2(std::string_view key, Vec2& out) {
    if (const auto* n = lookup(key)) {
      const auto* arr = n->as_array();
      if (arr == nullptr || arr->size() != 2 || !(*arr)[0].is_number() || !(*arr)[1].is_number())
        throw ValidationError(name(key), "expected [x, y]");
      out = {*(*arr)[0].value<double>(), *(*arr)[1].value<double>()};
    }
  }

  void numbers(std::string_view key, std::vector<double>& out) {
    if (const auto* n = lookup(key)) {
      const auto* arr = n->as_array();
      if (arr == nullptr) throw ValidationError(name(key), "expected an array of numbers");
      out.clear();
      for (const auto& e : *arr) {
        if (!e.is_number()) throw ValidationError(name(key), "expected an array of numbers");
        out.push_back(*e.value<double>());
      }
    }
  }

  [[nodiscard]] const toml::node* raw(std::string_view key) { return lookup(key); }

  [[nodiscard]] const toml::table* subtable(std::string_view key) {
    if (const auto* n = lookup(key)) {
      if (!n->is_table()) throw ValidationError(name(key), "expected a table");
      return n->as_table();
    }
    return nullptr;
  }

  [[nodiscard]] const toml::array* table_array(std::string_view key) {
    if (const auto* n = lookup(key)) {
      if (!n->is_array_of_tables()) throw ValidationError(name(key), "expected [[" + name(key) + "]]");
      return n->as_array();
    }
    return nullptr;
  }

  [[nodiscard]] std::string name(std::string_view key) const {
    return prefix_.empty() ? std::string(key) : prefix_ + "." + std::string(key);
  }

  void finish() const {
    for (const auto& [key, node] : table_) {
      if (!seen_.count(std::string(key.str())))
        throw ValidationError(name(key.str()), "unknown key");
    }
  }

 private:
  const toml::node* lookup(std::string_view key) {
    seen_.insert(std::string(key));
    return table_.get(key);
  }

  const toml::table& table_;
  std::string prefix_;
  std::set<std::string> seen_;
};

inline void format_number(std::ostream& os, double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  std::string_view s(buf, static_cast<std::size_t>(res.ptr - buf));
  os << s;
  if (s.find_first_of(".e") == std::string_view::npos) os << ".0";
}

inline std::string quote(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    if (c == '\n') {
      out += "\\n";
      continue;
    }
    out += c;
  }
  return out + "\"";
}

inline std::string_view terrain_kind_name(Terrain::Kind k) {
  switch (k) {
    case Terrain::Kind::Gapped:
      return "gapped";
    case Terrain::Kind::Rough:
      return "rough";
    case Terrain::Kind::Flat:
      break;
  }
  return "flat";
}

}  // namespace detail

/// Parses and validates a scenario from TOML text. `default_seed` applies when
/// the text has no `seed` key.
[[nodiscard]] inline ScenarioConfig parse_config(std::string_view text,
                                                 std::optional<std::uint64_t> default_seed = {}) {
  toml::table root;
  try {
    root = toml::parse(text);
  } catch (const toml::parse_error& e) {
    throw ParseError(static_cast<int>(e.source().begin.line), std::string(e.description()));
  }

  ScenarioConfig cfg;
  if (default_seed) cfg.seed = *default_seed;
  detail::TableReader top(root, "");
  if (auto s = top.string("scenario")) cfg.scenario = scenario_from_string(*s);
  if (auto s = top.string("planner")) cfg.planner = planner_from_string(*s);
  top.seed("seed", cfg.seed);
  top.integer("steps", cfg.steps);
  top.number("duration_s", cfg.duration_s);
  top.number("vx", cfg.command.vx);
  top.number("vy", cfg.command.vy);
  top.number("step_duration", cfg.command.step_duration);
  top.integer("warmup_steps", cfg.warmup_steps);
  top.number("foot_noise_sigma", cfg.foot_noise_sigma);
  top.number("velocity_noise_sigma", cfg.velocity_noise_sigma);
  top.boolean("balance_layer", cfg.balance_layer);
  if (auto s = top.string("out_dir")) cfg.out_dir = *s;
  top.boolean("emit_csv", cfg.emit_csv);
  top.boolean("emit_svg", cfg.emit_svg);

  if (const auto* t = top.subtable("params")) {
    detail::TableReader r(*t, "params");
    auto& p = cfg.params;
    r.number("mass", p.mass);
    r.number("com_height", p.com_height);
    r.number("gravity", p.gravity);
    r.number("l_max", p.l_max);
    r.number("w_min", p.w_min);
    r.number("w_nom", p.w_nom);
    r.number("reach_max", p.reach_max);
    r.vec2("kp", p.kp);
    r.vec2("kd", p.kd);
    r.number("td_min", p.td_min);
    r.number("td_max", p.td_max);
    r.vec2("cop_limit", p.cop_limit);
    r.finish();
  }

  if (const auto* t = top.subtable("terrain")) {
    detail::TableReader r(*t, "terrain");
    auto& ts = cfg.terrain;
    if (auto k = r.string("kind")) {
      if (*k == "flat") {
        ts.kind = Terrain::Kind::Flat;
      } else if (*k == "gapped") {
        ts.kind = Terrain::Kind::Gapped;
      } else if (*k == "rough") {
        ts.kind = Terrain::Kind::Rough;
      } else {
        throw ValidationError("terrain.kind", "expected flat, gapped or rough");
      }
    }
    if (const auto* g = r.raw("gaps")) {
      const auto* arr = g->as_array();
      if (arr == nullptr) throw ValidationError("terrain.gaps", "expected [[begin, end], ...]");
      for (const auto& e : *arr) {
        const auto* pair = e.as_array();
        if (pair == nullptr || pair->size() != 2 || !(*pair)[0].is_number() ||
            !(*pair)[1].is_number())
          throw ValidationError("terrain.gaps", "expected [[begin, end], ...]");
        ts.gaps.push_back({*(*pair)[0].value<double>(), *(*pair)[1].value<double>()});
      }
    }
    r.number("h_max", ts.h_max);
    std::uint64_t seed = 0;
    if (r.raw("seed") != nullptr) {
      r.seed("seed", seed);
      ts.seed = seed;
    }
    r.number("gap_margin", ts.gap_margin);
    r.number("gap_window", ts.gap_window);
    r.finish();
  }

  if (const auto* arr = top.table_array("command")) {
    for (const auto& e : *arr) {
      detail::TableReader r(*e.as_table(), "command");
      ScheduledCommand sc;
      sc.command = cfg.command;
      r.number("t_start", sc.t_start);
      r.number("vx", sc.command.vx);
      r.number("vy", sc.command.vy);
      r.number("step_duration", sc.command.step_duration);
      r.finish();
      cfg.schedule.push_back(sc);
    }
  }

  if (const auto* arr = top.table_array("push")) {
    for (const auto& e : *arr) {
      detail::TableReader r(*e.as_table(), "push");
      Push p;
      r.number("t", p.t);
      r.number("impulse", p.impulse);
      r.vec2("direction", p.direction);
      r.finish();
      cfg.pushes.push_back(p);
    }
  }

  if (const auto* t = top.subtable("push_grid")) {
    detail::TableReader r(*t, "push_grid");
    r.number("i_max", cfg.push_grid.i_max);
    r.integer("samples", cfg.push_grid.samples);
    r.finish();
  }
  if (const auto* t = top.subtable("rough")) {
    detail::TableReader r(*t, "rough");
    r.numbers("h_max", cfg.rough.h_max);
    r.integer("trials", cfg.rough.trials);
    r.finish();
  }
  if (const auto* t = top.subtable("sweep")) {
    detail::TableReader r(*t, "sweep");
    r.numbers("step_durations", cfg.sweep.step_durations);
    r.finish();
  }
  if (const auto* t = top.subtable("track")) {
    detail::TableReader r(*t, "track");
    r.number("ramp_s", cfg.track.ramp_s);
    r.finish();
  }
  top.finish();

  cfg.validate();
  return cfg;
}

/// TOML text that parses back to an equal config. Floats use the shortest
/// round-trip representation.
[[nodiscard]] inline std::string serialize_config(const ScenarioConfig& cfg) {
  using detail::format_number;
  std::ostringstream os;
  auto num = [&](std::string_view key, double v) {
    os << key << " = ";
    format_number(os, v);
    os << '\n';
  };
  auto vec = [&](std::string_view key, const Vec2& v) {
    os << key << " = [";
    format_number(os, v.x);
    os << ", ";
    format_number(os, v.y);
    os << "]\n";
  };
  auto list = [&](std::string_view key, const std::vector<double>& v) {
    os << key << " = [";
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (i) os << ", ";
      format_number(os, v[i]);
    }
    os << "]\n";
  };
  auto flag = [&](std::string_view key, bool b) { os << key << " = " << (b ? "true" : "false") << '\n'; };

  os << "scenario = " << detail::quote(to_string(cfg.scenario)) << '\n';
  os << "planner = " << detail::quote(stride_lab::to_string(cfg.planner)) << '\n';
  os << "seed = " << cfg.seed << '\n';
  os << "steps = " << cfg.steps << '\n';
  num("duration_s", cfg.duration_s);
  num("vx", cfg.command.vx);
  num("vy", cfg.command.vy);
  num("step_duration", cfg.command.step_duration);
  os << "warmup_steps = " << cfg.warmup_steps << '\n';
  num("foot_noise_sigma", cfg.foot_noise_sigma);
  num("velocity_noise_sigma", cfg.velocity_noise_sigma);
  flag("balance_layer", cfg.balance_layer);
  os << "out_dir = " << detail::quote(cfg.out_dir) << '\n';
  flag("emit_csv", cfg.emit_csv);
  flag("emit_svg", cfg.emit_svg);

  const auto& p = cfg.params;
  os << "\n[params]\n";
  num("mass", p.mass);
  num("com_height", p.com_height);
  num("gravity", p.gravity);
  num("l_max", p.l_max);
  num("w_min", p.w_min);
  num("w_nom", p.w_nom);
  num("reach_max", p.reach_max);
  vec("kp", p.kp);
  vec("kd", p.kd);
  num("td_min", p.td_min);
  num("td_max", p.td_max);
  vec("cop_limit", p.cop_limit);

  const auto& ts = cfg.terrain;
  os << "\n[terrain]\n";
  os << "kind = " << detail::quote(detail::terrain_kind_name(ts.kind)) << '\n';
  os << "gaps = [";
  for (std::size_t i = 0; i < ts.gaps.size(); ++i) {
    os << (i ? ", [" : "[");
    format_number(os, ts.gaps[i].begin);
    os << ", ";
    format_number(os, ts.gaps[i].end);
    os << ']';
  }
  os << "]\n";
  num("h_max", ts.h_max);
  if (ts.seed) os << "seed = " << *ts.seed << '\n';
  num("gap_margin", ts.gap_margin);
  num("gap_window", ts.gap_window);

  os << "\n[push_grid]\n";
  num("i_max", cfg.push_grid.i_max);
  os << "samples = " << cfg.push_grid.samples << '\n';
  os << "\n[rough]\n";
  list("h_max", cfg.rough.h_max);
  os << "trials = " << cfg.rough.trials << '\n';
  os << "\n[sweep]\n";
  list("step_durations", cfg.sweep.step_durations);
  os << "\n[track]\n";
  num("ramp_s", cfg.track.ramp_s);

  for (const auto& sc : cfg.schedule) {
    os << "\n[[command]]\n";
    num("t_start", sc.t_start);
    num("vx", sc.command.vx);
    num("vy", sc.command.vy);
    num("step_duration", sc.command.step_duration);
  }
  for (const auto& push : cfg.pushes) {
    os << "\n[[push]]\n";
    num("t", push.t);
    num("impulse", push.impulse);
    vec("direction", push.direction);
  }
  return os.str();
}

}  // namespace stride_lab::bench
