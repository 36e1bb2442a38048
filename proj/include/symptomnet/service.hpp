#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "symptomnet/calibration.hpp"
#include "symptomnet/inference.hpp"
#include "symptomnet/network.hpp"
#include "symptomnet/assessment_model.hpp"
#include "symptomnet/serialization.hpp"

namespace httplib {
class Server;
}

namespace symptomnet {

// Request error carrying an HTTP status and a machine-readable code.
class ApiError : public std::runtime_error {
public:
    ApiError(int status, std::string code, const std::string& message, std::string node = {})
        : std::runtime_error(message), status_(status), code_(std::move(code)), node_(std::move(node)) {}
    int status() const { return status_; }
    const std::string& code() const { return code_; }
    const std::string& node() const { return node_; }
    Json payload() const;

private:
    int status_;
    std::string code_;
    std::string node_;
};

struct HistoryEntry {
    std::string action;  // "evidence" | "interventions"
    Json body;
    std::map<std::string, double> conditions;  // raw P(present) after the action
};

// Evidence and interventions of one assessment. Mutations validate the whole
// body before changing anything; the history is append-only and replaying it
// on a fresh session reproduces the current state.
class Session {
public:
    explicit Session(std::string id) : id_(std::move(id)) {}

    const std::string& id() const { return id_; }
    const EvidenceMap& evidence() const { return evidence_; }
    const InterventionSet& interventions() const { return interventions_; }
    const std::vector<HistoryEntry>& history() const { return history_; }

    // {"evidence": {node: state index | state label | null}}; null clears.
    void set_evidence(const Json& body, const BayesianNetwork& network, const ModelLayout& layout);
    // {"add": [node...], "remove": [node...]}
    void set_interventions(const Json& body, const BayesianNetwork& network, const ModelLayout& layout);
    void apply(const std::string& action, const Json& body, const BayesianNetwork& network,
               const ModelLayout& layout);

    static Session replay(std::string id, const std::vector<HistoryEntry>& history, const BayesianNetwork& network,
                          const ModelLayout& layout);

    Json state(const BayesianNetwork& network) const;

private:
    void commit(std::string action, const Json& body, EvidenceMap evidence, InterventionSet interventions,
                const BayesianNetwork& network, const ModelLayout& layout);

    std::string id_;
    EvidenceMap evidence_;
    InterventionSet interventions_;
    std::vector<HistoryEntry> history_;
};

// Sessions keyed by id. The map is guarded by a reader-writer lock; each
// session has its own mutex so mutations of one session are serialized while
// different sessions proceed concurrently.
class SessionStore {
public:
    std::string create();
    bool erase(const std::string& id);
    std::size_t size() const;

    // Runs `fn` with the session locked. Throws ApiError 404 for unknown ids.
    template <typename Fn>
    auto with_session(const std::string& id, Fn&& fn) {
        auto slot = find(id);
        std::lock_guard lock(slot->mutex);
        return fn(slot->session);
    }

private:
    struct Slot {
        explicit Slot(std::string id) : session(std::move(id)) {}
        std::mutex mutex;
        Session session;
    };
    std::shared_ptr<Slot> find(const std::string& id) const;

    mutable std::shared_mutex mutex_;
    std::map<std::string, std::shared_ptr<Slot>> sessions_;
    std::size_t next_id_ = 1;
};

struct ApiResponse {
    int status = 200;
    Json body;
};

// HTTP-independent request handling; the loaded network and calibrators are
// shared read-only and never mutated.
class Service {
public:
    Service(NetworkFile model, CalibratorSet calibrators, ModelLayout layout = assessment_layout());

    const BayesianNetwork& network() const { return network_; }
    const CalibratorSet& calibrators() const { return calibrators_; }
    SessionStore& sessions() { return sessions_; }

    ApiResponse health() const;
    ApiResponse describe_network() const;
    ApiResponse create_session();
    ApiResponse get_session(const std::string& id);
    ApiResponse put_evidence(const std::string& id, const std::string& body);
    ApiResponse put_interventions(const std::string& id, const std::string& body);
    ApiResponse posteriors(const std::string& id);
    ApiResponse delete_session(const std::string& id);

    // Routes: POST /sessions, GET|DELETE /sessions/{id}, PUT /sessions/{id}/evidence,
    // PUT /sessions/{id}/interventions, GET /sessions/{id}/posteriors, GET /network, GET /health.
    void mount(httplib::Server& server);

private:
    Json query(const Session& session) const;

    NetworkFile model_;
    BayesianNetwork network_;
    CalibratorSet calibrators_;
    ModelLayout layout_;
    SessionStore sessions_;
};

}  // namespace symptomnet
