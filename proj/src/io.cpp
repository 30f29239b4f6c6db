#include "spheremix/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <system_error>

#include "json.hpp"

namespace spheremix {

namespace {

using nlohmann::json;

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    size_t at = 0;
    while (true) {
        const size_t comma = line.find(',', at);
        if (comma == std::string::npos) {
            out.push_back(line.substr(at));
            return out;
        }
        out.push_back(line.substr(at, comma - at));
        at = comma + 1;
    }
}

int parse_int(const std::string& s) {
    int v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size())
        throw InputError("malformed integer field: '" + s + "'");
    return v;
}

std::ofstream open_out(const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream f(path, std::ios::binary);  // binary keeps LF on every platform
    if (!f) throw InputError("cannot open for writing: " + path.string());
    return f;
}

std::ifstream open_in(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw InputError("cannot open for reading: " + path.string());
    return f;
}

std::vector<std::string> read_lines(const std::filesystem::path& path) {
    std::ifstream f = open_in(path);
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(f, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(line);
    }
    while (!lines.empty() && lines.back().empty()) lines.pop_back();
    return lines;
}

json parse_json(const std::string& text, const std::string& what) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) throw InputError("malformed JSON in " + what);
    return j;
}

// strict field extraction: missing key keeps the default, unknown keys throw
template <typename T>
void take(json& j, const char* key, T& into) {
    if (auto it = j.find(key); it != j.end()) {
        try {
            into = it->get<T>();
        } catch (const json::exception&) {
            throw InputError(std::string("bad value for config key '") + key + "'");
        }
        j.erase(it);
    }
}

void expect_empty(const json& j, const std::string& what) {
    if (!j.empty()) {
        std::string keys;
        for (auto it = j.begin(); it != j.end(); ++it) {
            if (!keys.empty()) keys += ", ";
            keys += it.key();
        }
        throw InputError("unknown " + what + " config keys: " + keys);
    }
}

}  // namespace

std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    if (ec != std::errc{}) throw InputError("cannot format double");
    return std::string(buf, ptr);
}

double parse_double(const std::string& s) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size())
        throw InputError("malformed numeric field: '" + s + "'");
    return v;
}

void write_matrix_csv(const std::filesystem::path& path, const std::string& id_column,
                      const std::vector<int>& ids, const Eigen::MatrixXd& m) {
    if (static_cast<Eigen::Index>(ids.size()) != m.rows())
        throw InputError("matrix writer: id count does not match rows");
    std::ofstream f = open_out(path);
    f << id_column;
    for (int c = 0; c < m.cols(); ++c) f << ",dim_" << c;
    f << "\n";
    for (int i = 0; i < m.rows(); ++i) {
        f << ids[static_cast<size_t>(i)];
        for (int c = 0; c < m.cols(); ++c) f << ',' << format_double(m(i, c));
        f << "\n";
    }
}

std::pair<std::vector<int>, Eigen::MatrixXd> read_matrix_csv(const std::filesystem::path& path,
                                                             const std::string& id_column) {
    const auto lines = read_lines(path);
    if (lines.empty()) throw InputError("empty matrix file: " + path.string());
    const auto header = split_csv_line(lines[0]);
    if (header.empty() || header[0] != id_column)
        throw InputError("matrix file " + path.string() + ": expected id column '" + id_column +
                         "'");
    const int cols = static_cast<int>(header.size()) - 1;
    for (int c = 0; c < cols; ++c)
        if (header[static_cast<size_t>(c) + 1] != "dim_" + std::to_string(c))
            throw InputError("matrix file " + path.string() + ": bad dimension header");
    std::vector<int> ids;
    Eigen::MatrixXd m(static_cast<int>(lines.size()) - 1, cols);
    for (size_t t = 1; t < lines.size(); ++t) {
        const auto cells = split_csv_line(lines[t]);
        if (static_cast<int>(cells.size()) != cols + 1)
            throw InputError("matrix file " + path.string() + ": row " + std::to_string(t) +
                             " has wrong field count");
        ids.push_back(parse_int(cells[0]));
        for (int c = 0; c < cols; ++c)
            m(static_cast<int>(t) - 1, c) = parse_double(cells[static_cast<size_t>(c) + 1]);
    }
    return {std::move(ids), std::move(m)};
}

void write_labels_csv(const std::filesystem::path& path, const std::string& id_column,
                      const std::vector<int>& ids, const Eigen::VectorXi& labels) {
    if (static_cast<Eigen::Index>(ids.size()) != labels.size())
        throw InputError("label writer: id count does not match labels");
    std::ofstream f = open_out(path);
    f << id_column << ",label\n";
    for (Eigen::Index i = 0; i < labels.size(); ++i)
        f << ids[static_cast<size_t>(i)] << ',' << labels[i] << "\n";
}

std::pair<std::vector<int>, Eigen::VectorXi> read_labels_csv(const std::filesystem::path& path,
                                                             const std::string& id_column) {
    const auto lines = read_lines(path);
    if (lines.empty()) throw InputError("empty label file: " + path.string());
    if (lines[0] != id_column + ",label")
        throw InputError("label file " + path.string() + ": bad header");
    std::vector<int> ids;
    Eigen::VectorXi labels(static_cast<int>(lines.size()) - 1);
    for (size_t t = 1; t < lines.size(); ++t) {
        const auto cells = split_csv_line(lines[t]);
        if (cells.size() != 2)
            throw InputError("label file " + path.string() + ": bad row " + std::to_string(t));
        ids.push_back(parse_int(cells[0]));
        labels[static_cast<int>(t) - 1] = parse_int(cells[1]);
    }
    return {std::move(ids), std::move(labels)};
}

void write_pairs_csv(const std::filesystem::path& path, const RelationalPairSet& pairs) {
    std::ofstream f = open_out(path);
    f << "channel,i,j,label\n";
    for (const auto& p : pairs.sim) f << "S," << p.i << ',' << p.j << ',' << p.label << "\n";
    for (const auto& p : pairs.rel) f << "R," << p.i << ',' << p.j << ',' << p.label << "\n";
}

RelationalPairSet read_pairs_csv(const std::filesystem::path& path, int n) {
    const auto lines = read_lines(path);
    if (lines.empty()) throw InputError("empty pairs file: " + path.string());
    if (lines[0] != "channel,i,j,label")
        throw InputError("pairs file " + path.string() + ": bad header");
    RelationalPairSet out;
    for (size_t t = 1; t < lines.size(); ++t) {
        const auto cells = split_csv_line(lines[t]);
        if (cells.size() != 4)
            throw InputError("pairs file " + path.string() + ": bad row " + std::to_string(t));
        Channel ch;
        if (cells[0] == "S") {
            ch = Channel::similarity;
        } else if (cells[0] == "R") {
            ch = Channel::relatedness;
        } else {
            throw InputError("pairs file " + path.string() + ": unknown channel '" + cells[0] +
                             "'");
        }
        try {
            out.add(ch, parse_int(cells[1]), parse_int(cells[2]), parse_int(cells[3]), n);
        } catch (const std::invalid_argument& e) {
            throw InputError("pairs file " + path.string() + ": " + e.what());
        }
    }
    try {
        out.validate(n);
    } catch (const std::invalid_argument& e) {
        throw InputError("pairs file " + path.string() + ": " + e.what());
    }
    return out;
}

void write_priors_csv(const std::filesystem::path& path, const PriorMatrix& priors) {
    std::ofstream f = open_out(path);
    f << "feature_id,cluster_id,prob\n";
    for (int i = 0; i < priors.rows(); ++i)
        for (int pos = priors.support_begin(i); pos < priors.support_end(i); ++pos)
            f << i << ',' << priors.cluster_at(pos) << ',' << format_double(priors.prob_at(pos))
              << "\n";
}

PriorMatrix read_priors_csv(const std::filesystem::path& path, int n, int K) {
    const auto lines = read_lines(path);
    if (lines.empty()) throw InputError("empty priors file: " + path.string());
    if (lines[0] != "feature_id,cluster_id,prob")
        throw InputError("priors file " + path.string() + ": bad header");
    std::vector<int> row, col;
    std::vector<double> prob;
    for (size_t t = 1; t < lines.size(); ++t) {
        const auto cells = split_csv_line(lines[t]);
        if (cells.size() != 3)
            throw InputError("priors file " + path.string() + ": bad row " + std::to_string(t));
        row.push_back(parse_int(cells[0]));
        col.push_back(parse_int(cells[1]));
        prob.push_back(parse_double(cells[2]));
    }
    try {
        return PriorMatrix(n, K, row, col, prob);
    } catch (const std::invalid_argument& e) {
        throw InputError("priors file " + path.string() + ": " + e.what());
    }
}

void write_universe(const std::filesystem::path& dir, const FeatureUniverse& u) {
    std::filesystem::create_directories(dir);
    for (size_t l = 0; l < u.sources.size(); ++l)
        write_matrix_csv(dir / ("source_" + std::to_string(l) + ".csv"), "feature_id",
                         u.sources[l].feature_ids, u.sources[l].embeddings);
}

FeatureUniverse read_universe(const std::filesystem::path& dir, bool require_unit_rows) {
    FeatureUniverse u;
    for (int l = 0;; ++l) {
        const auto path = dir / ("source_" + std::to_string(l) + ".csv");
        if (!std::filesystem::exists(path)) break;
        auto [ids, m] = read_matrix_csv(path, "feature_id");
        SourceSet s;
        s.source_id = l;
        s.feature_ids = std::move(ids);
        s.embeddings = std::move(m);
        u.sources.push_back(std::move(s));
    }
    if (u.sources.empty())
        throw InputError("no source_<l>.csv files under " + dir.string());
    int max_id = -1;
    for (const auto& s : u.sources)
        for (int id : s.feature_ids) max_id = std::max(max_id, id);
    u.n = max_id + 1;
    try {
        u.validate(require_unit_rows);
    } catch (const std::invalid_argument& e) {
        throw InputError("universe under " + dir.string() + ": " + e.what());
    }
    return u;
}

namespace {

std::vector<int> iota_ids(int n) {
    std::vector<int> ids(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) ids[static_cast<size_t>(i)] = i;
    return ids;
}

}  // namespace

void write_model(const std::filesystem::path& dir, const ModelState& s,
                 const CompositeWeights& w) {
    std::filesystem::create_directories(dir);
    write_matrix_csv(dir / "V.csv", "feature_id", iota_ids(s.n()), s.V);
    write_matrix_csv(dir / "mu.csv", "cluster_id", iota_ids(s.K()), s.mu);
    write_matrix_csv(dir / "R.csv", "row_id", iota_ids(static_cast<int>(s.R.rows())), s.R);
    for (size_t l = 0; l < s.W.size(); ++l)
        write_matrix_csv(dir / ("w_" + std::to_string(l) + ".csv"), "row_id",
                         iota_ids(static_cast<int>(s.W[l].rows())), s.W[l]);
    write_labels_csv(dir / "z.csv", "feature_id", iota_ids(s.n()), s.z);
    json params;
    params["kappa"] = s.kappa;
    params["beta1"] = s.beta1;
    params["beta2"] = s.beta2;
    params["beta3"] = s.beta3;
    params["weights"] = {{"vmf", w.vmf}, {"sim", w.sim}, {"rel", w.rel}};
    params["version"] = kToolVersion;
    write_text_file(dir / "params.json", params.dump(2) + "\n");
}

ModelState read_model(const std::filesystem::path& dir) {
    ModelState s;
    s.V = read_matrix_csv(dir / "V.csv", "feature_id").second;
    s.mu = read_matrix_csv(dir / "mu.csv", "cluster_id").second;
    s.R = read_matrix_csv(dir / "R.csv", "row_id").second;
    for (int l = 0;; ++l) {
        const auto path = dir / ("w_" + std::to_string(l) + ".csv");
        if (!std::filesystem::exists(path)) break;
        s.W.push_back(read_matrix_csv(path, "row_id").second);
    }
    s.z = read_labels_csv(dir / "z.csv", "feature_id").second;
    json params = parse_json(read_text_file(dir / "params.json"), "model params");
    try {
        s.kappa = params.at("kappa").get<double>();
        s.beta1 = params.at("beta1").get<double>();
        s.beta2 = params.at("beta2").get<double>();
        s.beta3 = params.at("beta3").get<double>();
    } catch (const json::exception& e) {
        throw InputError(std::string("model params.json: ") + e.what());
    }
    return s;
}

void write_trace_csv(const std::filesystem::path& path, const FitTrace& trace) {
    std::ofstream f = open_out(path);
    f << "stage,index,composite,lr,vmf,sim,rel,em_iterations,step3_steps,wall_ms\n";
    for (size_t t = 0; t < trace.step1_objective.size(); ++t)
        f << "init," << t << ',' << format_double(trace.step1_objective[t])
          << ",0,0,0,0,0,0,0\n";
    for (const auto& rec : trace.outer)
        f << "outer," << rec.outer << ',' << format_double(rec.composite) << ','
          << format_double(rec.lr) << ',' << format_double(rec.vmf) << ','
          << format_double(rec.sim) << ',' << format_double(rec.rel) << ','
          << rec.em_iterations << ',' << rec.step3_steps << ',' << format_double(rec.wall_ms)
          << "\n";
}

void write_scenario(const std::filesystem::path& dir, const Scenario& sc) {
    std::filesystem::create_directories(dir);
    write_text_file(dir / "scenario.json", scenario_config_to_json(sc.config) + "\n");
    write_universe(dir / "sources", sc.universe);
    write_pairs_csv(dir / "pairs.csv", sc.pairs);
    write_pairs_csv(dir / "eval_pairs.csv", sc.eval_pairs);
    write_priors_csv(dir / "priors.csv", sc.priors);

    const auto truth = dir / "truth";
    std::filesystem::create_directories(truth);
    const ScenarioTruth& t = sc.truth;
    write_matrix_csv(truth / "V.csv", "feature_id", iota_ids(sc.config.n), t.V);
    write_matrix_csv(truth / "mu.csv", "cluster_id", iota_ids(sc.config.K), t.mu);
    write_matrix_csv(truth / "R.csv", "row_id", iota_ids(sc.config.r), t.R);
    for (size_t l = 0; l < t.W.size(); ++l)
        write_matrix_csv(truth / ("w_" + std::to_string(l) + ".csv"), "row_id",
                         iota_ids(static_cast<int>(t.W[l].rows())), t.W[l]);
    write_labels_csv(truth / "z.csv", "feature_id", iota_ids(sc.config.n), t.z);
    {
        std::ofstream f = open_out(truth / "anchor_clusters.csv");
        f << "cluster_id\n";
        for (int k : t.anchor_clusters) f << k << "\n";
    }
    {
        std::ofstream f = open_out(truth / "eval_features.csv");
        f << "feature_id\n";
        for (int i : t.eval_features) f << i << "\n";
    }
    json params;
    params["kappa"] = t.kappa;
    params["beta1"] = t.beta1;
    params["beta2"] = t.beta2;
    params["beta3"] = t.beta3;
    write_text_file(truth / "params.json", params.dump(2) + "\n");
}

namespace {

std::vector<int> read_id_list(const std::filesystem::path& path, const std::string& header) {
    const auto lines = read_lines(path);
    if (lines.empty() || lines[0] != header)
        throw InputError("bad id list file: " + path.string());
    std::vector<int> out;
    for (size_t t = 1; t < lines.size(); ++t) out.push_back(parse_int(lines[t]));
    return out;
}

}  // namespace

Scenario read_scenario(const std::filesystem::path& dir) {
    Scenario sc;
    sc.config = scenario_config_from_json(read_text_file(dir / "scenario.json"));
    sc.universe = read_universe(dir / "sources", sc.config.noise == NoiseModel::vmf);
    if (sc.universe.n != sc.config.n)
        throw InputError("scenario: sources disagree with config n");
    sc.pairs = read_pairs_csv(dir / "pairs.csv", sc.config.n);
    sc.eval_pairs = read_pairs_csv(dir / "eval_pairs.csv", sc.config.n);
    sc.priors = read_priors_csv(dir / "priors.csv", sc.config.n, sc.config.K);

    const auto truth = dir / "truth";
    ScenarioTruth& t = sc.truth;
    t.V = read_matrix_csv(truth / "V.csv", "feature_id").second;
    t.mu = read_matrix_csv(truth / "mu.csv", "cluster_id").second;
    t.R = read_matrix_csv(truth / "R.csv", "row_id").second;
    for (int l = 0;; ++l) {
        const auto path = truth / ("w_" + std::to_string(l) + ".csv");
        if (!std::filesystem::exists(path)) break;
        t.W.push_back(read_matrix_csv(path, "row_id").second);
    }
    t.z = read_labels_csv(truth / "z.csv", "feature_id").second;
    t.anchor_clusters = read_id_list(truth / "anchor_clusters.csv", "cluster_id");
    t.eval_features = read_id_list(truth / "eval_features.csv", "feature_id");
    json params = parse_json(read_text_file(truth / "params.json"), "truth params");
    try {
        t.kappa = params.at("kappa").get<double>();
        t.beta1 = params.at("beta1").get<double>();
        t.beta2 = params.at("beta2").get<double>();
        t.beta3 = params.at("beta3").get<double>();
    } catch (const json::exception& e) {
        throw InputError(std::string("truth params.json: ") + e.what());
    }
    return sc;
}

std::string config_digest(const std::string& canonical_json) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : canonical_json) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    static const char* hex = "0123456789abcdef";
    for (int i = 15; i >= 0; --i) {
        buf[i] = hex[h & 0xf];
        h >>= 4;
    }
    buf[16] = '\0';
    return std::string(buf);
}

void write_manifest(const std::filesystem::path& path, const RunManifest& m) {
    json j;
    j["command"] = m.command;
    j["config_digest"] = m.digest;
    j["seeds"] = m.seeds;
    j["version"] = m.version;
    j["replications"] = json::array();
    for (const auto& rep : m.replications)
        j["replications"].push_back(
            {{"id", rep.id}, {"status", rep.status}, {"outputs", rep.outputs}});
    write_text_file(path, j.dump(2) + "\n");
}

ScenarioConfig scenario_config_from_json(const std::string& text) {
    json j = parse_json(text, "scenario config");
    if (!j.is_object()) throw InputError("scenario config must be a JSON object");
    ScenarioConfig cfg;
    take(j, "n", cfg.n);
    take(j, "K", cfg.K);
    take(j, "r", cfg.r);
    take(j, "kappa", cfg.kappa);
    take(j, "L", cfg.L);
    take(j, "source_dim", cfg.source_dim);
    take(j, "source_concentration", cfg.source_concentration);
    take(j, "w_mean", cfg.w_mean);
    take(j, "w_sd", cfg.w_sd);
    take(j, "mu_mean", cfg.mu_mean);
    take(j, "mu_sd", cfg.mu_sd);
    take(j, "beta1", cfg.beta1);
    take(j, "beta2", cfg.beta2);
    take(j, "beta3", cfg.beta3);
    take(j, "r_diag", cfg.r_diag);
    take(j, "sim_pos_pct", cfg.sim_pos_pct);
    take(j, "sim_neg_pct", cfg.sim_neg_pct);
    take(j, "rel_pos_pct", cfg.rel_pos_pct);
    take(j, "rel_neg_pct", cfg.rel_neg_pct);
    take(j, "eval_pair_pct", cfg.eval_pair_pct);
    take(j, "anchor_fraction", cfg.anchor_fraction);
    take(j, "spectral_priors", cfg.spectral_priors);
    std::string noise = "vmf";
    take(j, "noise", noise);
    if (noise == "vmf") {
        cfg.noise = NoiseModel::vmf;
    } else if (noise == "gaussian") {
        cfg.noise = NoiseModel::gaussian;
    } else {
        throw InputError("scenario config: noise must be 'vmf' or 'gaussian'");
    }
    take(j, "gaussian_sd", cfg.gaussian_sd);
    take(j, "seed", cfg.seed);
    expect_empty(j, "scenario");
    try {
        cfg.validate();
    } catch (const std::invalid_argument& e) {
        throw InputError(e.what());
    }
    return cfg;
}

std::string scenario_config_to_json(const ScenarioConfig& cfg) {
    json j;
    j["n"] = cfg.n;
    j["K"] = cfg.K;
    j["r"] = cfg.r;
    j["kappa"] = cfg.kappa;
    j["L"] = cfg.L;
    j["source_dim"] = cfg.source_dim;
    j["source_concentration"] = cfg.source_concentration;
    j["w_mean"] = cfg.w_mean;
    j["w_sd"] = cfg.w_sd;
    j["mu_mean"] = cfg.mu_mean;
    j["mu_sd"] = cfg.mu_sd;
    j["beta1"] = cfg.beta1;
    j["beta2"] = cfg.beta2;
    j["beta3"] = cfg.beta3;
    j["r_diag"] = cfg.r_diag;
    j["sim_pos_pct"] = cfg.sim_pos_pct;
    j["sim_neg_pct"] = cfg.sim_neg_pct;
    j["rel_pos_pct"] = cfg.rel_pos_pct;
    j["rel_neg_pct"] = cfg.rel_neg_pct;
    j["eval_pair_pct"] = cfg.eval_pair_pct;
    j["anchor_fraction"] = cfg.anchor_fraction;
    j["spectral_priors"] = cfg.spectral_priors;
    j["noise"] = cfg.noise == NoiseModel::vmf ? "vmf" : "gaussian";
    j["gaussian_sd"] = cfg.gaussian_sd;
    j["seed"] = cfg.seed;
    return j.dump();
}

FitConfig fit_config_from_json(const std::string& text) {
    json j = parse_json(text, "fit config");
    if (!j.is_object()) throw InputError("fit config must be a JSON object");
    FitConfig cfg;
    take(j, "r", cfg.r);
    take(j, "K", cfg.K);
    take(j, "w_vmf", cfg.weights.vmf);
    take(j, "w_sim", cfg.weights.sim);
    take(j, "w_rel", cfg.weights.rel);
    take(j, "max_outer", cfg.max_outer);
    take(j, "tol_rel", cfg.tol_rel);
    take(j, "max_inner", cfg.max_inner);
    take(j, "inner_tol", cfg.inner_tol);
    take(j, "em_max_iter", cfg.em_max_iter);
    take(j, "em_tol", cfg.em_tol);
    take(j, "step_v", cfg.step_v);
    take(j, "step_beta", cfg.step_beta);
    take(j, "step_r", cfg.step_r);
    take(j, "step_mu_sim", cfg.step_mu_sim);
    take(j, "v_passes", cfg.v_passes);
    take(j, "max_halvings", cfg.max_halvings);
    take(j, "seed", cfg.seed);
    expect_empty(j, "fit");
    try {
        cfg.validate();
    } catch (const std::invalid_argument& e) {
        throw InputError(e.what());
    }
    return cfg;
}

std::string fit_config_to_json(const FitConfig& cfg) {
    json j;
    j["r"] = cfg.r;
    j["K"] = cfg.K;
    j["w_vmf"] = cfg.weights.vmf;
    j["w_sim"] = cfg.weights.sim;
    j["w_rel"] = cfg.weights.rel;
    j["max_outer"] = cfg.max_outer;
    j["tol_rel"] = cfg.tol_rel;
    j["max_inner"] = cfg.max_inner;
    j["inner_tol"] = cfg.inner_tol;
    j["em_max_iter"] = cfg.em_max_iter;
    j["em_tol"] = cfg.em_tol;
    j["step_v"] = cfg.step_v;
    j["step_beta"] = cfg.step_beta;
    j["step_r"] = cfg.step_r;
    j["step_mu_sim"] = cfg.step_mu_sim;
    j["v_passes"] = cfg.v_passes;
    j["max_halvings"] = cfg.max_halvings;
    j["seed"] = cfg.seed;
    return j.dump();
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream f = open_in(path);
    std::ostringstream buf;
    buf << f.rdbuf();
    return buf.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream f = open_out(path);
    f << text;
}

}  // namespace spheremix
