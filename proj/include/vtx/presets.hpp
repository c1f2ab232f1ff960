#pragma once

#include <string>
#include <vector>

#include "vtx/config.hpp"

namespace vtx {

struct PresetInfo {
  std::string name;
  std::string description;
  bool is_sweep = false;
};

std::vector<PresetInfo> list_presets();

/// Throws ValidationError (path "preset") for an unknown name.
RunConfig preset(const std::string& name);

}  // namespace vtx
