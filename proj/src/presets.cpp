#include <json.hpp>

#include "ewalk/scenario.hpp"

namespace ewalk {

namespace detail {
const std::vector<std::pair<std::string, std::string>>& embedded_presets();
}

namespace {

const std::pair<std::string, std::string>* find_preset(const std::string& name) {
    for (const auto& p : detail::embedded_presets())
        if (p.first == name) return &p;
    return nullptr;
}

}  // namespace

std::vector<PresetInfo> list_presets() {
    std::vector<PresetInfo> out;
    for (const auto& [name, text] : detail::embedded_presets())
        out.push_back({name, nlohmann::json::parse(text).value("description", "")});
    return out;
}

const std::string& preset_source(const std::string& name) {
    const auto* p = find_preset(name);
    if (!p) throw Error(Errc::schema_violation, "unknown preset '" + name + "'");
    return p->second;
}

ScenarioConfig preset_config(const std::string& name) { return parse_config(preset_source(name)); }

}  // namespace ewalk
