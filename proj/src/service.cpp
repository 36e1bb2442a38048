#include "symptomnet/service.hpp"

#include <algorithm>

#include <httplib.h>

#include "symptomnet/workflow.hpp"

namespace symptomnet {

namespace {

ApiError as_api_error(const InvalidQuery& e, const BayesianNetwork& network) {
    const bool known = network.contains(e.node());
    return ApiError(400, known ? "bad_state" : "unknown_node", e.what(), e.node());
}

Json parse_body(const std::string& body) {
    try {
        Json json = Json::parse(body);
        if (!json.is_object()) throw ApiError(400, "bad_request", "request body must be a JSON object");
        return json;
    } catch (const nlohmann::json::parse_error& e) {
        throw ApiError(400, "bad_request", std::string("malformed JSON: ") + e.what());
    }
}

std::vector<std::string> node_list(const Json& body, const char* key, const BayesianNetwork& network) {
    std::vector<std::string> out;
    if (!body.contains(key)) return out;
    const auto& list = body.at(key);
    if (!list.is_array()) throw ApiError(400, "bad_request", std::string("'") + key + "' must be a list of node names");
    for (const auto& n : list) {
        if (!n.is_string()) throw ApiError(400, "bad_request", std::string("'") + key + "' must be a list of node names");
        auto node = n.get<std::string>();
        if (!network.contains(node)) throw ApiError(400, "unknown_node", "unknown node '" + node + "'", node);
        out.push_back(std::move(node));
    }
    return out;
}

std::string node_role(const std::string& name, const ModelLayout& layout) {
    const auto conditions = layout.condition_names();
    if (std::find(conditions.begin(), conditions.end(), name) != conditions.end()) return "condition";
    if (layout.condition_of(name)) return "symptom";
    if (layout.surrogate(name)) return "surrogate";
    return "other";
}

template <typename Fn>
ApiResponse guarded(const BayesianNetwork& network, Fn&& fn) {
    try {
        return fn();
    } catch (const ApiError& e) {
        return {e.status(), e.payload()};
    } catch (const InvalidQuery& e) {
        const auto err = as_api_error(e, network);
        return {err.status(), err.payload()};
    } catch (const InconsistentEvidence& e) {
        return {409, ApiError(409, "inconsistent_evidence", e.what()).payload()};
    } catch (const std::exception& e) {
        return {500, ApiError(500, "internal", e.what()).payload()};
    }
}

}  // namespace

Json ApiError::payload() const {
    Json err{{"code", code_}, {"message", what()}};
    if (!node_.empty()) err["node"] = node_;
    return Json{{"error", std::move(err)}};
}

void Session::set_evidence(const Json& body, const BayesianNetwork& network, const ModelLayout& layout) {
    if (!body.contains("evidence") || !body.at("evidence").is_object()) {
        throw ApiError(400, "bad_request", "body must contain an 'evidence' object");
    }
    EvidenceMap next = evidence_;
    for (const auto& [node, value] : body.at("evidence").items()) {
        if (!network.contains(node)) throw ApiError(400, "unknown_node", "unknown node '" + node + "'", node);
        if (value.is_null()) {
            next.erase(node);
            continue;
        }
        try {
            next[node] = parse_state(network, node, value);
        } catch (const InvalidQuery& e) {
            throw as_api_error(e, network);
        }
    }
    commit("evidence", body, std::move(next), interventions_, network, layout);
}

void Session::set_interventions(const Json& body, const BayesianNetwork& network, const ModelLayout& layout) {
    if (!body.contains("add") && !body.contains("remove")) {
        throw ApiError(400, "bad_request", "body must contain 'add' and/or 'remove' lists");
    }
    InterventionSet next = interventions_;
    for (const auto& n : node_list(body, "add", network)) next.insert(n);
    for (const auto& n : node_list(body, "remove", network)) next.erase(n);
    commit("interventions", body, evidence_, std::move(next), network, layout);
}

void Session::apply(const std::string& action, const Json& body, const BayesianNetwork& network,
                    const ModelLayout& layout) {
    if (action == "evidence") {
        set_evidence(body, network, layout);
    } else if (action == "interventions") {
        set_interventions(body, network, layout);
    } else {
        throw ApiError(400, "bad_request", "unknown action '" + action + "'");
    }
}

void Session::commit(std::string action, const Json& body, EvidenceMap evidence, InterventionSet interventions,
                     const BayesianNetwork& network, const ModelLayout& layout) {
    // Fails with InconsistentEvidence before any state changes.
    const auto probs = query_conditions(network, evidence, interventions, layout);
    evidence_ = std::move(evidence);
    interventions_ = std::move(interventions);
    history_.push_back({std::move(action), body, probs.present});
}

Session Session::replay(std::string id, const std::vector<HistoryEntry>& history, const BayesianNetwork& network,
                        const ModelLayout& layout) {
    Session s(std::move(id));
    for (const auto& h : history) s.apply(h.action, h.body, network, layout);
    return s;
}

Json Session::state(const BayesianNetwork& network) const {
    Json evidence = Json::object();
    for (const auto& [node, state] : evidence_) evidence[node] = network.node(node).states.at(state);
    Json history = Json::array();
    for (const auto& h : history_) {
        Json probs = Json::object();
        for (const auto& [c, p] : h.conditions) probs[c] = p;
        history.push_back(Json{{"action", h.action}, {"body", h.body}, {"conditions", std::move(probs)}});
    }
    return Json{{"id", id_},
                {"evidence", std::move(evidence)},
                {"interventions", Json(std::vector<std::string>(interventions_.begin(), interventions_.end()))},
                {"history", std::move(history)}};
}

std::string SessionStore::create() {
    std::unique_lock lock(mutex_);
    std::string id = "s" + std::to_string(next_id_++);
    sessions_.emplace(id, std::make_shared<Slot>(id));
    return id;
}

bool SessionStore::erase(const std::string& id) {
    std::unique_lock lock(mutex_);
    return sessions_.erase(id) > 0;
}

std::size_t SessionStore::size() const {
    std::shared_lock lock(mutex_);
    return sessions_.size();
}

std::shared_ptr<SessionStore::Slot> SessionStore::find(const std::string& id) const {
    std::shared_lock lock(mutex_);
    const auto it = sessions_.find(id);
    if (it == sessions_.end()) throw ApiError(404, "unknown_session", "no session '" + id + "'");
    return it->second;
}

Service::Service(NetworkFile model, CalibratorSet calibrators, ModelLayout layout)
    : model_(std::move(model)),
      network_(BayesianNetwork::create(model_.spec, model_.cpds)),
      calibrators_(std::move(calibrators)),
      layout_(std::move(layout)) {
    for (const auto& [condition, cal] : calibrators_) {
        if (!network_.contains(condition)) {
            throw NetworkError("calibrator for unknown condition '" + condition + "'");
        }
    }
}

Json Service::query(const Session& session) const {
    QueryRequest request{session.evidence(), session.interventions(), {}};
    return run_query(network_, &calibrators_, request, layout_);
}

ApiResponse Service::health() const {
    return {200, Json{{"status", "ok"}, {"nodes", network_.size()}, {"calibrated", !calibrators_.empty()}}};
}

ApiResponse Service::describe_network() const {
    Json nodes = Json::array();
    for (const auto& n : network_.spec().nodes) {
        Json entry{{"name", n.name}, {"states", n.states}, {"role", node_role(n.name, layout_)}};
        if (const auto* s = layout_.surrogate(n.name)) {
            entry["symptom"] = s->symptom;
            entry["family"] = s->family;
        } else if (const auto* c = layout_.condition_of(n.name)) {
            entry["condition"] = c->condition;
        }
        nodes.push_back(std::move(entry));
    }
    Json edges = Json::array();
    for (const auto& [p, c] : network_.spec().edges) edges.push_back(Json::array({p, c}));
    Json groups = Json::array();
    for (const auto& g : layout_.conditions) groups.push_back(Json{{"condition", g.condition}, {"symptoms", g.symptoms}});
    return {200, Json{{"nodes", std::move(nodes)}, {"edges", std::move(edges)}, {"conditions", std::move(groups)}}};
}

ApiResponse Service::create_session() {
    return guarded(network_, [&] {
        const std::string id = sessions_.create();
        return sessions_.with_session(id, [&](Session& s) {
            Json body = s.state(network_);
            body["result"] = query(s);
            return ApiResponse{201, std::move(body)};
        });
    });
}

ApiResponse Service::get_session(const std::string& id) {
    return guarded(network_, [&] {
        return sessions_.with_session(id, [&](Session& s) {
            Json body = s.state(network_);
            body["result"] = query(s);
            return ApiResponse{200, std::move(body)};
        });
    });
}

ApiResponse Service::put_evidence(const std::string& id, const std::string& raw) {
    return guarded(network_, [&] {
        const Json body = parse_body(raw);
        return sessions_.with_session(id, [&](Session& s) {
            s.set_evidence(body, network_, layout_);
            Json out = s.state(network_);
            out["result"] = query(s);
            return ApiResponse{200, std::move(out)};
        });
    });
}

ApiResponse Service::put_interventions(const std::string& id, const std::string& raw) {
    return guarded(network_, [&] {
        const Json body = parse_body(raw);
        return sessions_.with_session(id, [&](Session& s) {
            s.set_interventions(body, network_, layout_);
            Json out = s.state(network_);
            out["result"] = query(s);
            return ApiResponse{200, std::move(out)};
        });
    });
}

ApiResponse Service::posteriors(const std::string& id) {
    return guarded(network_, [&] {
        return sessions_.with_session(id, [&](Session& s) { return ApiResponse{200, query(s)}; });
    });
}

ApiResponse Service::delete_session(const std::string& id) {
    return guarded(network_, [&] {
        if (!sessions_.erase(id)) throw ApiError(404, "unknown_session", "no session '" + id + "'");
        return ApiResponse{200, Json{{"deleted", id}}};
    });
}

void Service::mount(httplib::Server& server) {
    const auto reply = [](httplib::Response& res, const ApiResponse& r) {
        res.status = r.status;
        res.set_content(r.body.dump(), "application/json");
    };
    server.Get("/health", [this, reply](const httplib::Request&, httplib::Response& res) { reply(res, health()); });
    server.Get("/network",
               [this, reply](const httplib::Request&, httplib::Response& res) { reply(res, describe_network()); });
    server.Post("/sessions",
                [this, reply](const httplib::Request&, httplib::Response& res) { reply(res, create_session()); });
    server.Get(R"(/sessions/([^/]+))", [this, reply](const httplib::Request& req, httplib::Response& res) {
        reply(res, get_session(req.matches[1]));
    });
    server.Delete(R"(/sessions/([^/]+))", [this, reply](const httplib::Request& req, httplib::Response& res) {
        reply(res, delete_session(req.matches[1]));
    });
    server.Put(R"(/sessions/([^/]+)/evidence)", [this, reply](const httplib::Request& req, httplib::Response& res) {
        reply(res, put_evidence(req.matches[1], req.body));
    });
    server.Put(R"(/sessions/([^/]+)/interventions)",
               [this, reply](const httplib::Request& req, httplib::Response& res) {
                   reply(res, put_interventions(req.matches[1], req.body));
               });
    server.Get(R"(/sessions/([^/]+)/posteriors)", [this, reply](const httplib::Request& req, httplib::Response& res) {
        reply(res, posteriors(req.matches[1]));
    });
}

}  // namespace symptomnet
