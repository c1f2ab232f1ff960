#include "vtx/presets.hpp"

#include "vtx/errors.hpp"

namespace vtx {

namespace {

using nlohmann::json;

struct PresetEntry {
  const char* name;
  const char* description;
  bool sweep;
  const char* json_text;
};

// Light signal of fig4: illumination windows sized so that the four cycles
// come out as types b, a, c, c at the default parameters.
// Light signal of fig5: 100 s on / 150 s off, long enough for the balanced
// vesicle (35 pumps, 35 symporters) to run dry near t = 6500 s.
constexpr PresetEntry kPresets[] = {
    {"fig3", "buffer molarity 0/10/20/100 mol/m^3, no symporters, 600 s light then 600 s dark", false, R"({
      "name": "fig3", "solver": "all",
      "vesicle": {"n_symporters": 0},
      "light": {"windows": [["0 s", "600 s"]], "horizon": "1200 s"},
      "variants": [
        {"label": "B0=0", "set": {"environment.buffer_molarity": "0 mol/m^3"}},
        {"label": "B0=10", "set": {"environment.buffer_molarity": "10 mol/m^3"}},
        {"label": "B0=20", "set": {"environment.buffer_molarity": "20 mol/m^3"}},
        {"label": "B0=100", "set": {"environment.buffer_molarity": "100 mol/m^3"}}
      ]})"},
    {"fig4", "four illumination cycles showing cycle types b, a, c, c", false, R"({
      "name": "fig4", "solver": "all",
      "vesicle": {},
      "light": {"windows": [["10 s", "35 s"], ["50 s", "80 s"], ["110 s", "140 s"], ["150 s", "180 s"]],
                "horizon": "250 s"},
      "expected_cycle_types": ["b", "a", "c", "c"]})"},
    {"fig5", "pump/symporter ratios 3/4, 1, 4/3 at 70 proteins with 3.14 mol/m^3 cargo", false, R"({
      "name": "fig5", "solver": "all",
      "vesicle": {"n_pumps": 35, "n_symporters": 35},
      "environment": {"c_s_in0": "3.14 mol/m^3"},
      "light": {"periodic": {"start": "0 s", "on": "100 s", "off": "150 s"}, "horizon": "7000 s"},
      "variants": [
        {"label": "ratio=3/4", "set": {"vesicle.pump_ratio": "3/4"}},
        {"label": "ratio=1", "set": {"vesicle.pump_ratio": "1/1"}},
        {"label": "ratio=4/3", "set": {"vesicle.pump_ratio": "4/3"}}
      ]})"},
    {"fig6", "symport duration against illumination duration for several symport and leakage rates", true, R"({
      "name": "fig6", "solver": "all",
      "vesicle": {},
      "light": {"windows": [["0 s", "100 s"]], "horizon": "1100 s"},
      "sweep": {
        "parameter": "light.duration",
        "values": ["10 s", "20 s", "30 s", "40 s", "50 s", "60 s", "80 s", "100 s", "120 s", "140 s", "160 s",
                   "180 s", "200 s", "250 s", "300 s", "350 s", "400 s"],
        "series": [
          {"label": "gSym=0.004,gL=3e-6", "set": {"kinetics.symport_rate": "0.004 1/s", "vesicle.permeability": "3e-6 m/s"}},
          {"label": "gSym=0.005,gL=3e-6", "set": {"kinetics.symport_rate": "0.005 1/s", "vesicle.permeability": "3e-6 m/s"}},
          {"label": "gSym=0.006,gL=3e-6", "set": {"kinetics.symport_rate": "0.006 1/s", "vesicle.permeability": "3e-6 m/s"}},
          {"label": "gSym=0.004,gL=5e-6", "set": {"kinetics.symport_rate": "0.004 1/s", "vesicle.permeability": "5e-6 m/s"}},
          {"label": "gSym=0.005,gL=5e-6", "set": {"kinetics.symport_rate": "0.005 1/s", "vesicle.permeability": "5e-6 m/s"}},
          {"label": "gSym=0.006,gL=5e-6", "set": {"kinetics.symport_rate": "0.006 1/s", "vesicle.permeability": "5e-6 m/s"}}
        ]}})"},
    {"fig9", "vesicle population, 100 modeled vesicles x 10 experiments, 800 s light", false, R"({
      "name": "fig9", "solver": "all",
      "population": {},
      "light": {"windows": [["0 s", "800 s"]], "horizon": "2400 s"}})"},
    {"fig10", "population sweep over the mean inner diameter 100/500/1000 nm", true, R"({
      "name": "fig10", "solver": "closed",
      "population": {},
      "light": {"windows": [["0 s", "800 s"]], "horizon": "2400 s"},
      "sweep": {"parameter": "population.d_mean", "values": ["100 nm", "500 nm", "1000 nm"]}})"},
    {"fig11", "population sweep over the mean permeability 1e-6/5e-6/1e-5 m/s", true, R"({
      "name": "fig11", "solver": "closed",
      "population": {},
      "light": {"windows": [["0 s", "800 s"]], "horizon": "2400 s"},
      "sweep": {"parameter": "population.g_l_mean", "values": ["1e-6 m/s", "5e-6 m/s", "1e-5 m/s"]}})"},
};

}  // namespace

std::vector<PresetInfo> list_presets() {
  std::vector<PresetInfo> out;
  for (const auto& p : kPresets) out.push_back({p.name, p.description, p.sweep});
  return out;
}

RunConfig preset(const std::string& name) {
  for (const auto& p : kPresets) {
    if (name == p.name) return parse_config(json::parse(p.json_text));
  }
  std::string known;
  for (const auto& p : kPresets) known += std::string(known.empty() ? "" : ", ") + p.name;
  throw ValidationError("preset", "unknown preset '" + name + "' (known: " + known + ")");
}

}  // namespace vtx
