#include "mda/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace mda {

std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::string stream_csv(const ApproximateStream& stream, const Target& target,
                       const Decomposition& dec, const NormSpec& norms) {
    std::ostringstream out;
    for (int i = 0; i < dec.m(); ++i) out << "p_" << (i + 1) << ",";
    for (int j = 0; j < dec.n(); ++j) out << "q_" << (j + 1) << ",";
    out << "error,height\n";
    for (const auto& a : stream.members) {
        for (long long v : a.p) out << v << ",";
        for (long long v : a.q) out << v << ",";
        auto err = error_term_d(target, a.p, a.q, dec, norms);
        out << format_double(err ? *err : 0.0) << "," << format_double(a.height) << "\n";
    }
    return out.str();
}

std::string packets_csv(const std::vector<Packet>& packets, const Decomposition& dec,
                        const Params& params) {
    std::ostringstream out;
    out << "error";
    for (int i = 0; i < dec.d(); ++i) out << ",proj_" << (i + 1);
    for (int N : params.congruence_moduli)
        for (int i = 0; i < dec.d(); ++i) out << ",mod" << N << "_" << (i + 1);
    if (dec.d() == 2)
        out << ",beta";
    else
        for (int i = 0; i < dec.d() * dec.d(); ++i) out << ",shape_" << (i + 1);
    out << "\n";
    for (const auto& pk : packets) {
        out << format_double(pk.error);
        for (double v : pk.proj) out << "," << format_double(v);
        for (int N : params.congruence_moduli) {
            auto it = pk.residues.find(N);
            for (int i = 0; i < dec.d(); ++i)
                out << "," << (it != pk.residues.end() ? it->second[i] : 0);
        }
        if (dec.d() == 2)
            out << "," << format_double(pk.torus_beta.value_or(-1.0));
        else
            for (double v : pk.shape_basis.a) out << "," << format_double(v);
        out << "\n";
    }
    return out.str();
}

std::string visits_csv(const std::vector<VisitRecord>& records,
                       const ApproximateStream& stream, const Decomposition& dec) {
    std::ostringstream out;
    int dim = dec.k() + dec.r() - 1;
    for (int i = 0; i < dim; ++i) out << "t_" << (i + 1) << ",";
    for (int i = 0; i < dec.m(); ++i) out << "p_" << (i + 1) << ",";
    for (int j = 0; j < dec.n(); ++j) out << "q_" << (j + 1) << ",";
    out << "verified\n";
    for (const auto& r : records) {
        for (double t : r.time.comps) out << format_double(t) << ",";
        const auto& a = stream.members[r.member_index];
        for (long long v : a.p) out << v << ",";
        for (long long v : a.q) out << v << ",";
        out << (r.verified ? 1 : 0) << "\n";
    }
    return out.str();
}

std::string series_csv(const ReturnSeries& series) {
    std::ostringstream out;
    out << "l,t,tau,mask";
    for (int c = 0; c < series.m; ++c) out << ",w_" << (c + 1);
    out << "\n";
    for (size_t l = 0; l < series.entries.size(); ++l) {
        const auto& e = series.entries[l];
        out << l << "," << format_double(e.t) << "," << format_double(e.gap) << ",1";
        for (int c = 0; c < series.m; ++c)
            out << "," << format_double(std::exp(e.log_q * series.n / series.m - e.t) * e.unit[c]);
        out << "\n";
    }
    return out.str();
}

std::string reports_json(const std::vector<TestReport>& reports, const OutputMeta& meta) {
    nlohmann::json j;
    j["schema"] = "report-v1";
    j["config_hash"] = fnv1a(meta.config_text);
    j["seed"] = meta.seed;
    j["reports"] = nlohmann::json::array();
    bool all = true;
    for (const auto& r : reports) {
        nlohmann::json e;
        e["name"] = r.name;
        e["statistic"] = r.statistic;
        e["threshold"] = r.threshold;
        e["pass"] = r.pass;
        e["sample_size"] = r.sample_size;
        e["target"] = r.target;
        e["seed"] = r.seed;
        j["reports"].push_back(e);
        all = all && r.pass;
    }
    j["all_pass"] = all;
    return j.dump(2) + "\n";
}

std::string sidecar_json(const OutputMeta& meta, long long members, long long degenerate) {
    nlohmann::json j;
    j["schema"] = meta.schema;
    j["config"] = meta.config_text;
    j["config_hash"] = fnv1a(meta.config_text);
    j["seed"] = meta.seed;
    j["members"] = members;
    j["degenerate"] = degenerate;
    return j.dump(2) + "\n";
}

std::string csv_to_json_rows(const std::string& csv, const OutputMeta& meta) {
    nlohmann::json j;
    j["schema"] = meta.schema;
    j["config_hash"] = fnv1a(meta.config_text);
    j["seed"] = meta.seed;
    std::istringstream in(csv);
    std::string header;
    std::getline(in, header);
    std::vector<std::string> cols;
    {
        std::istringstream hs(header);
        std::string c;
        while (std::getline(hs, c, ',')) cols.push_back(c);
    }
    j["rows"] = nlohmann::json::array();
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        nlohmann::json row;
        std::istringstream ls(line);
        std::string cell;
        size_t i = 0;
        while (std::getline(ls, cell, ',') && i < cols.size()) {
            row[cols[i]] = cell;
            ++i;
        }
        j["rows"].push_back(row);
    }
    return j.dump(2) + "\n";
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path);
    f << content;
}

} // namespace mda
