#include "eog/diagnosis.hpp"

#include "eog/entity.hpp"
#include "eog/error.hpp"
#include "eog/snapshot_io.hpp"

namespace eog {

using nlohmann::json;

json to_json(const Diagnosis& d) {
    json entities = json::array();
    for (const auto& e : d.entities) {
        entities.push_back({{"name", e.name},
                            {"contributing_factor", e.contributing_factor},
                            {"reasoning", e.reasoning},
                            {"evidence", e.evidence}});
    }
    json propagations = json::array();
    for (const auto& p : d.propagations) propagations.push_back(to_json(p));
    json alerts = json::array();
    for (const auto& a : d.alerts_explained) {
        alerts.push_back(
            {{"alert", a.alert}, {"explanation", a.explanation}, {"explained", a.explained}});
    }
    json out = {{"entities", entities}, {"propagations", propagations}, {"alerts_explained", alerts}};
    if (d.uncertain) out["uncertain"] = true;
    return out;
}

Diagnosis diagnosis_from_json(const json& j) {
    Diagnosis d;
    for (const auto& e : j.at("entities")) {
        DiagnosisEntity de;
        de.name = e.at("name").get<std::string>();
        parse_entity_id(de.name); // names must parse as entity ids
        de.contributing_factor = e.at("contributing_factor").get<bool>();
        de.reasoning = e.value("reasoning", "");
        de.evidence = e.value("evidence", "");
        d.entities.push_back(std::move(de));
    }
    for (const auto& p : j.value("propagations", json::array())) {
        d.propagations.push_back(causal_edge_from_json(p));
    }
    for (const auto& a : j.value("alerts_explained", json::array())) {
        AlertExplanation ae;
        ae.alert = a.at("alert").get<std::string>();
        ae.explanation = a.value("explanation", "");
        ae.explained = a.value("explained", false);
        d.alerts_explained.push_back(std::move(ae));
    }
    d.uncertain = j.value("uncertain", false);
    return d;
}

} // namespace eog
