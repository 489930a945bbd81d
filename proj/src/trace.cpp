#include "idrkit/trace.hpp"

#include <cstdio>
#include <fstream>

#include <json.hpp>

namespace idrkit {

void write_trace_csv(const Trace& t, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open trace file " + path);
    out << "matvec,dot,axpy,time_s,res_iter,res_true\n";
    char buf[64];
    for (const Snapshot& s : t.snapshots) {
        out << s.n_matvec << ',' << s.counters.n_dot << ',' << s.counters.n_axpy << ',';
        std::snprintf(buf, sizeof buf, "%.6e", s.time_s);
        out << buf << ',';
        std::snprintf(buf, sizeof buf, "%.17g", s.res_iter);
        out << buf << ',';
        std::snprintf(buf, sizeof buf, "%.17g", s.res_true);
        out << buf << '\n';
    }
}

void write_trace_json(const Trace& t, const std::string& path) {
    nlohmann::json j;
    j["metadata"] = t.metadata;
    j["annotations"] = nlohmann::json::array();
    for (const Annotation& a : t.annotations) {
        nlohmann::json ja;
        ja["matvec"] = a.n_matvec;
        ja["kind"] = a.kind;
        if (!a.text.empty()) ja["text"] = a.text;
        if (!a.data.empty()) ja["data"] = a.data;
        j["annotations"].push_back(std::move(ja));
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open trace sidecar " + path);
    out << j.dump(2) << '\n';
}

} // namespace idrkit
