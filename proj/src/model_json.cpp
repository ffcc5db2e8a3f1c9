#include "fadetail/model_json.hpp"

#include <functional>
#include <map>
#include <stdexcept>
#include <vector>

#include "json.hpp"

namespace fadetail::json {

namespace {

using nlohmann::ordered_json;

double field(const ordered_json& params, const char* name) {
    auto it = params.find(name);
    if (it == params.end())
        throw std::invalid_argument(std::string("missing param \"") + name + "\"");
    if (!it->is_number())
        throw std::invalid_argument(std::string("param \"") + name +
                                    "\" must be a number");
    return it->get<double>();
}

void check_fields(const ordered_json& params, std::vector<const char*> allowed) {
    for (auto it = params.begin(); it != params.end(); ++it) {
        bool ok = false;
        for (const char* a : allowed)
            if (it.key() == a) ok = true;
        if (!ok)
            throw std::invalid_argument("unknown param \"" + it.key() + "\"");
    }
}

using Parser = std::function<models::ChannelModel(const ordered_json&)>;

const std::map<std::string, Parser>& parsers() {
    using namespace models;
    static const std::map<std::string, Parser> table = {
        {"TwoWave",
         [](const ordered_json& p) -> ChannelModel {
             check_fields(p, {"rho1", "rho2"});
             return TwoWave{field(p, "rho1"), field(p, "rho2")};
         }},
        {"ThreeWave",
         [](const ordered_json& p) -> ChannelModel {
             check_fields(p, {"rho1", "rho2", "rho3"});
             return ThreeWave{field(p, "rho1"), field(p, "rho2"), field(p, "rho3")};
         }},
        {"Rayleigh",
         [](const ordered_json& p) -> ChannelModel {
             check_fields(p, {"A"});
             return Rayleigh{field(p, "A")};
         }},
        {"Rician",
         [](const ordered_json& p) -> ChannelModel {
             check_fields(p, {"k1", "A"});
             return Rician{field(p, "k1"), field(p, "A")};
         }},
        {"TWDP",
         [](const ordered_json& p) -> ChannelModel {
             check_fields(p, {"k2", "delta", "A"});
             return Twdp{field(p, "k2"), field(p, "delta"), field(p, "A")};
         }},
        {"Weibull",
         [](const ordered_json& p) -> ChannelModel {
             check_fields(p, {"beta_w", "A"});
             return Weibull{field(p, "beta_w"), field(p, "A")};
         }},
        {"Nakagami",
         [](const ordered_json& p) -> ChannelModel {
             check_fields(p, {"m", "A"});
             return Nakagami{field(p, "m"), field(p, "A")};
         }},
        {"KappaMu",
         [](const ordered_json& p) -> ChannelModel {
             check_fields(p, {"kappa", "mu", "A"});
             return KappaMu{field(p, "kappa"), field(p, "mu"), field(p, "A")};
         }},
        {"KappaMuM",
         [](const ordered_json& p) -> ChannelModel {
             check_fields(p, {"kappa", "mu", "m", "A"});
             return KappaMuM{field(p, "kappa"), field(p, "mu"), field(p, "m"),
                             field(p, "A")};
         }},
        {"KappaMuAlpha",
         [](const ordered_json& p) -> ChannelModel {
             check_fields(p, {"kappa", "mu", "alpha_ig", "A"});
             return KappaMuAlpha{field(p, "kappa"), field(p, "mu"),
                                 field(p, "alpha_ig"), field(p, "A")};
         }},
        {"Suzuki",
         [](const ordered_json& p) -> ChannelModel {
             check_fields(p, {"sigma_dB", "mu_dB"});
             return Suzuki{field(p, "sigma_dB"), field(p, "mu_dB")};
         }},
        {"LogNormal",
         [](const ordered_json& p) -> ChannelModel {
             check_fields(p, {"sigma_dB", "mu_dB"});
             return LogNormal{field(p, "sigma_dB"), field(p, "mu_dB")};
         }},
        {"CascadedRayleigh",
         [](const ordered_json& p) -> ChannelModel {
             check_fields(p, {"gamma_corr", "A"});
             return CascadedRayleigh{field(p, "gamma_corr"), field(p, "A")};
         }},
    };
    return table;
}

models::ChannelModel parse_model_json(const ordered_json& j) {
    if (!j.is_object())
        throw std::invalid_argument("model must be a JSON object");
    auto name_it = j.find("model");
    if (name_it == j.end() || !name_it->is_string())
        throw std::invalid_argument("missing \"model\" name");
    for (auto it = j.begin(); it != j.end(); ++it)
        if (it.key() != "model" && it.key() != "params")
            throw std::invalid_argument("unknown key \"" + it.key() + "\"");
    ordered_json params = j.value("params", ordered_json::object());
    if (!params.is_object())
        throw std::invalid_argument("\"params\" must be an object");
    const auto& table = parsers();
    auto it = table.find(name_it->get<std::string>());
    if (it == table.end())
        throw std::invalid_argument("unknown model \"" +
                                    name_it->get<std::string>() + "\"");
    models::ChannelModel m = it->second(params);
    models::validate(m);
    return m;
}

ordered_json serialize_model_json(const models::ChannelModel& model) {
    using namespace models;
    ordered_json params = std::visit(
        [](const auto& m) -> ordered_json {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, TwoWave>)
                return {{"rho1", m.rho1}, {"rho2", m.rho2}};
            else if constexpr (std::is_same_v<T, ThreeWave>)
                return {{"rho1", m.rho1}, {"rho2", m.rho2}, {"rho3", m.rho3}};
            else if constexpr (std::is_same_v<T, Rayleigh>)
                return {{"A", m.A}};
            else if constexpr (std::is_same_v<T, Rician>)
                return {{"k1", m.k1}, {"A", m.A}};
            else if constexpr (std::is_same_v<T, Twdp>)
                return {{"k2", m.k2}, {"delta", m.delta}, {"A", m.A}};
            else if constexpr (std::is_same_v<T, Weibull>)
                return {{"beta_w", m.beta_w}, {"A", m.A}};
            else if constexpr (std::is_same_v<T, Nakagami>)
                return {{"m", m.m}, {"A", m.A}};
            else if constexpr (std::is_same_v<T, KappaMu>)
                return {{"kappa", m.kappa}, {"mu", m.mu}, {"A", m.A}};
            else if constexpr (std::is_same_v<T, KappaMuM>)
                return {{"kappa", m.kappa}, {"mu", m.mu}, {"m", m.m}, {"A", m.A}};
            else if constexpr (std::is_same_v<T, KappaMuAlpha>)
                return {{"kappa", m.kappa},
                        {"mu", m.mu},
                        {"alpha_ig", m.alpha_ig},
                        {"A", m.A}};
            else if constexpr (std::is_same_v<T, Suzuki> ||
                               std::is_same_v<T, LogNormal>)
                return {{"sigma_dB", m.sigma_dB}, {"mu_dB", m.mu_dB}};
            else
                return {{"gamma_corr", m.gamma_corr}, {"A", m.A}};
        },
        model);
    return {{"model", models::model_name(model)}, {"params", params}};
}

}  // namespace

models::ChannelModel parse_model(const std::string& text) {
    ordered_json j;
    try {
        j = ordered_json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("bad JSON: ") + e.what());
    }
    return parse_model_json(j);
}

std::string serialize_model(const models::ChannelModel& model) {
    return serialize_model_json(model).dump();
}

DiversityConfig parse_diversity(const std::string& text) {
    ordered_json j;
    try {
        j = ordered_json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("bad JSON: ") + e.what());
    }
    if (!j.is_object())
        throw std::invalid_argument("diversity config must be a JSON object");
    for (auto it = j.begin(); it != j.end(); ++it)
        if (it.key() != "scheme" && it.key() != "branches")
            throw std::invalid_argument("unknown key \"" + it.key() + "\"");
    auto sch = j.find("scheme");
    if (sch == j.end() || !sch->is_string())
        throw std::invalid_argument("missing \"scheme\" (SC or MRC)");
    DiversityConfig out;
    std::string s = sch->get<std::string>();
    if (s == "SC")
        out.scheme = diversity::Scheme::SelectionCombining;
    else if (s == "MRC")
        out.scheme = diversity::Scheme::MaximumRatioCombining;
    else
        throw std::invalid_argument("scheme must be \"SC\" or \"MRC\"");
    auto br = j.find("branches");
    if (br == j.end() || !br->is_array() || br->empty())
        throw std::invalid_argument("\"branches\" must be a non-empty array");
    for (const auto& b : *br) out.set.branches.push_back(parse_model_json(b));
    diversity::validate(out.set);
    return out;
}

std::string serialize_diversity(const DiversityConfig& config) {
    ordered_json branches = ordered_json::array();
    for (const auto& b : config.set.branches)
        branches.push_back(serialize_model_json(b));
    ordered_json j = {
        {"scheme",
         config.scheme == diversity::Scheme::SelectionCombining ? "SC" : "MRC"},
        {"branches", branches}};
    return j.dump();
}

}  // namespace fadetail::json
