#include "etc/io.hpp"

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

namespace etc {

namespace {

Matrix matrix_from(const Json& j, const char* what) {
    if (!j.is_array() || j.empty()) throw ConfigError(std::string(what) + ": expected a non-empty array of rows");
    const auto rows = j.size();
    const auto cols = j.at(0).size();
    Matrix m(rows, cols);
    for (std::size_t r = 0; r < rows; ++r) {
        const Json& row = j.at(r);
        if (!row.is_array() || row.size() != cols) throw ConfigError(std::string(what) + ": ragged rows");
        for (std::size_t c = 0; c < cols; ++c) m(r, c) = row.at(c).get<double>();
    }
    if (!m.allFinite()) throw ConfigError(std::string(what) + ": non-finite entry");
    return m;
}

Json matrix_to(const Matrix& m) {
    Json rows = Json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        Json row = Json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(row);
    }
    return rows;
}

Vector vector_from(const Json& j, const char* what) {
    if (!j.is_array()) throw ConfigError(std::string(what) + ": expected an array");
    Vector v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t k = 0; k < j.size(); ++k) v(k) = j.at(k).get<double>();
    return v;
}

Json vector_to(const Vector& v) {
    Json a = Json::array();
    for (Eigen::Index k = 0; k < v.size(); ++k) a.push_back(v(k));
    return a;
}

// A number applies to every agent; an array must have one entry per agent.
Vector per_agent(const Json& section, const char* key, int agents) {
    if (!section.contains(key)) throw ConfigError(std::string("missing field: ") + key);
    const Json& j = section.at(key);
    if (j.is_number()) return Vector::Constant(agents, j.get<double>());
    Vector v = vector_from(j, key);
    if (v.size() != agents) throw ConfigError(std::string(key) + ": expected one value per agent");
    return v;
}

double number(const Json& section, const char* key) {
    if (!section.contains(key)) throw ConfigError(std::string("missing field: ") + key);
    return section.at(key).get<double>();
}

double number_or(const Json& section, const char* key, double fallback) {
    return section.contains(key) ? section.at(key).get<double>() : fallback;
}

const Json& section(const Json& j, const char* key) {
    if (!j.contains(key) || !j.at(key).is_object()) throw ConfigError(std::string("missing section: ") + key);
    return j.at(key);
}

std::vector<Vector> columns_from(const Json& j, const char* what) {
    std::vector<Vector> out;
    if (!j.is_array()) throw ConfigError(std::string(what) + ": expected an array");
    for (const auto& row : j) out.push_back(vector_from(row, what));
    return out;
}

Json columns_to(const std::vector<Vector>& vs) {
    Json a = Json::array();
    for (const auto& v : vs) a.push_back(vector_to(v));
    return a;
}

PlantModel plant_from(const Json& p) {
    const std::string model = p.value("model", std::string("spacecraft"));
    if (model == "spacecraft") {
        OrbitParameters orbit;
        orbit.mu = number_or(p, "mu", orbit.mu);
        orbit.r = number_or(p, "r", orbit.r);
        orbit.omega_dot = number_or(p, "omega_dot", 0.0);
        if (p.contains("omega")) orbit.omega = p.at("omega").get<double>();
        return build_spacecraft_model(orbit);
    }
    if (model == "matrices") {
        PlantModel pm{matrix_from(p.at("A"), "A"), matrix_from(p.at("B"), "B"), matrix_from(p.at("C"), "C")};
        validate_plant(pm);
        return pm;
    }
    throw ConfigError("unknown plant model: " + model);
}

}  // namespace

Json parse_json_text(const std::string& text) {
    try {
        return Json::parse(text);
    } catch (const Json::parse_error& e) {
        std::size_t line = 1, col = 1;
        const std::size_t upto = std::min<std::size_t>(e.byte > 0 ? e.byte - 1 : 0, text.size());
        for (std::size_t k = 0; k < upto; ++k) {
            if (text[k] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        throw ConfigError("JSON parse error at line " + std::to_string(line) + ", column " + std::to_string(col),
                          line, col);
    }
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

Scenario scenario_from_json(const Json& j) {
    try {
        if (!j.is_object()) throw ConfigError("config root must be an object");
        Scenario s;
        s.plant = plant_from(section(j, "plant"));

        const Json& g = section(j, "graphs");
        const int agents = g.at("agents").get<int>();
        if (agents < 1) throw ConfigError("graphs.agents must be positive");
        std::vector<Graph> graphs;
        for (const auto& list : g.at("edges")) {
            std::vector<std::pair<int, int>> edges;
            for (const auto& e : list) {
                if (!e.is_array() || e.size() != 2) throw ConfigError("edges must be [i, j] pairs");
                edges.emplace_back(e.at(0).get<int>() - 1, e.at(1).get<int>() - 1);
            }
            graphs.push_back(graph_from_edges(agents, edges));
        }
        s.topology = union_and_check(graphs);
        s.chain = make_markov_chain(matrix_from(section(j, "markov").at("generator"), "generator"));

        const Json& a = section(j, "attack");
        const int p = s.plant.p();
        AttackSignal signal = default_attack_signal(agents, p);
        if (a.contains("signal")) {
            const Json& sg = a.at("signal");
            if (sg.contains("amplitude")) signal.amplitude = per_agent(sg, "amplitude", agents);
            if (sg.contains("omega")) signal.omega = per_agent(sg, "omega", agents);
            if (sg.contains("phase")) signal.phase = per_agent(sg, "phase", agents);
            if (sg.contains("direction")) signal.direction = columns_from(sg.at("direction"), "direction");
        }
        s.attack = make_attack_config(per_agent(a, "probabilities", agents), number(a, "tau"), signal,
                                      number_or(a, "resample_interval", number_or(section(j, "integration"), "h", 0.01)),
                                      a.value("enabled", true));

        const Json& t = section(j, "trigger");
        const Json& ad = section(j, "adaptive");
        s.scalars = ProtocolScalars{per_agent(ad, "dbar", agents),    per_agent(t, "o", agents),
                                    per_agent(t, "upsilon", agents),  per_agent(t, "iota", agents),
                                    per_agent(t, "eta", agents),      per_agent(t, "varsigma", agents),
                                    per_agent(ad, "beta", agents),    per_agent(t, "varpi0", agents),
                                    per_agent(ad, "d0", agents)};
        const std::string mode = t.value("xi_hold_mode", std::string("refresh"));
        if (mode == "refresh")
            s.xi_hold = XiHoldMode::refresh;
        else if (mode == "freeze")
            s.xi_hold = XiHoldMode::freeze;
        else
            throw ConfigError("xi_hold_mode must be refresh or freeze");

        const Json& in = section(j, "integration");
        s.h = number(in, "h");
        s.horizon = number(in, "horizon");
        s.decimation = in.value("decimation", 10);

        const Json& ic = section(j, "initial_conditions");
        s.initial.position_range = number_or(ic, "position_range", 5.0);
        if (ic.contains("x0")) s.initial.x0 = columns_from(ic.at("x0"), "x0");
        const std::string obs = ic.value("observer", std::string("measurement"));
        if (obs == "zero")
            s.initial.observer = ObserverInit::zero;
        else if (obs == "measurement")
            s.initial.observer = ObserverInit::measurement;
        else if (obs == "given") {
            s.initial.observer = ObserverInit::given;
            s.initial.xhat0 = columns_from(ic.at("xhat0"), "xhat0");
        } else
            throw ConfigError("initial_conditions.observer must be zero, measurement or given");

        if (j.contains("synthesis")) {
            const Json& sy = j.at("synthesis");
            s.synthesis.c = number_or(sy, "c", s.synthesis.c);
            s.synthesis.kappa = number_or(sy, "kappa", s.synthesis.kappa);
            if (sy.contains("epsilon")) s.synthesis.epsilon = sy.at("epsilon").get<double>();
        }
        if (j.contains("baseline")) {
            const Json& b = j.at("baseline");
            s.baseline.kappa = number_or(b, "kappa", s.baseline.kappa);
            s.baseline.beta1 = number_or(b, "beta1", s.baseline.beta1);
            s.baseline.beta2 = number_or(b, "beta2", s.baseline.beta2);
            s.baseline.mu = number_or(b, "mu", s.baseline.mu);
            s.baseline.c = number_or(b, "c", s.baseline.c);
            s.baseline.gamma = b.contains("gamma") ? per_agent(b, "gamma", agents) : Vector::Ones(agents);
            const std::string st = b.value("state", std::string("observer"));
            if (st != "observer" && st != "raw") throw ConfigError("baseline.state must be observer or raw");
            s.baseline.raw_state = st == "raw";
        } else {
            s.baseline.gamma = Vector::Ones(agents);
        }
        s.seed = j.value("seed", std::uint64_t{1});
        validate_scenario(s);
        return s;
    } catch (const Json::exception& e) {
        throw ConfigError(std::string("config schema error: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("invalid config: ") + e.what());
    } catch (const std::runtime_error& e) {
        if (dynamic_cast<const ConfigError*>(&e)) throw;
        throw ConfigError(std::string("invalid config: ") + e.what());
    }
}

Json scenario_to_json(const Scenario& s) {
    Json j;
    j["plant"] = {{"model", "matrices"}, {"A", matrix_to(s.plant.A)}, {"B", matrix_to(s.plant.B)},
                  {"C", matrix_to(s.plant.C)}};
    Json edges = Json::array();
    for (const auto& g : s.topology.graphs) {
        Json list = Json::array();
        for (const auto& [a, b] : edge_list(g)) list.push_back({a + 1, b + 1});
        edges.push_back(list);
    }
    j["graphs"] = {{"agents", s.agents()}, {"edges", edges}};
    j["markov"] = {{"generator", matrix_to(s.chain.generator)}};
    const auto& raw = s.attack.raw;
    j["attack"] = {{"enabled", s.attack.enabled},
                   {"probabilities", vector_to(s.attack.probability)},
                   {"tau", s.attack.tau},
                   {"resample_interval", s.attack.resample_interval},
                   {"signal",
                    {{"amplitude", vector_to(raw.amplitude)},
                     {"omega", vector_to(raw.omega)},
                     {"phase", vector_to(raw.phase)},
                     {"direction", columns_to(raw.direction)}}}};
    const auto& sc = s.scalars;
    j["trigger"] = {{"iota", vector_to(sc.iota)},       {"o", vector_to(sc.o)},
                    {"upsilon", vector_to(sc.upsilon)}, {"eta", vector_to(sc.eta)},
                    {"varsigma", vector_to(sc.varsigma)}, {"varpi0", vector_to(sc.varpi0)},
                    {"xi_hold_mode", s.xi_hold == XiHoldMode::refresh ? "refresh" : "freeze"}};
    j["adaptive"] = {{"beta", vector_to(sc.beta)}, {"dbar", vector_to(sc.dbar)}, {"d0", vector_to(sc.d0)}};
    j["integration"] = {{"h", s.h}, {"horizon", s.horizon}, {"decimation", s.decimation}};
    Json ic = {{"position_range", s.initial.position_range}};
    if (!s.initial.x0.empty()) ic["x0"] = columns_to(s.initial.x0);
    switch (s.initial.observer) {
        case ObserverInit::zero: ic["observer"] = "zero"; break;
        case ObserverInit::measurement: ic["observer"] = "measurement"; break;
        case ObserverInit::given:
            ic["observer"] = "given";
            ic["xhat0"] = columns_to(s.initial.xhat0);
            break;
    }
    j["initial_conditions"] = ic;
    j["synthesis"] = {{"c", s.synthesis.c}, {"kappa", s.synthesis.kappa}};
    if (s.synthesis.epsilon) j["synthesis"]["epsilon"] = *s.synthesis.epsilon;
    const auto& b = s.baseline;
    j["baseline"] = {{"kappa", b.kappa}, {"beta1", b.beta1}, {"beta2", b.beta2}, {"mu", b.mu}, {"c", b.c},
                     {"gamma", vector_to(b.gamma.size() ? b.gamma : Vector::Ones(s.agents()))},
                     {"state", b.raw_state ? "raw" : "observer"}};
    j["seed"] = s.seed;
    return j;
}

Scenario load_scenario(const std::filesystem::path& path) {
    return scenario_from_json(parse_json_text(read_text_file(path)));
}

std::string fnv1a_hex(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string scenario_digest(const Scenario& s) { return fnv1a_hex(scenario_to_json(s).dump()); }

Json default_scenario_json() {
    Json j;
    j["plant"] = {{"model", "spacecraft"}, {"mu", 3.986e14}, {"r", 4.224e7}, {"omega_dot", 0.0}};
    j["graphs"] = {{"agents", 10},
                   {"edges",
                    {{{1, 2}, {2, 3}, {4, 5}, {6, 7}, {8, 9}, {9, 10}}, {{3, 4}, {5, 6}, {7, 8}, {10, 1}}}}};
    j["markov"] = {{"generator", {{-1.0, 1.0}, {2.0, -2.0}}}};
    j["attack"] = {{"enabled", true},
                   {"probabilities", {0.32, 0.24, 0.30, 0.42, 0.27, 0.32, 0.25, 0.23, 0.39, 0.28}},
                   {"tau", 0.02},
                   {"resample_interval", 0.01}};
    j["trigger"] = {{"iota", 640000.0}, {"o", 0.002},   {"upsilon", 0.00173},
                    {"eta", 0.05},      {"varsigma", 15900.0}, {"varpi0", 10.0},
                    {"xi_hold_mode", "refresh"}};
    j["adaptive"] = {{"beta", 1000.0}, {"dbar", 22.5}, {"d0", 1.05}};
    j["synthesis"] = {{"c", 5.2356}, {"kappa", 0.001}};
    j["baseline"] = {{"kappa", 0.05}, {"beta1", 0.8}, {"beta2", 0.35}, {"mu", 1.0},
                     {"c", 10.0},     {"gamma", 1.0}, {"state", "observer"}};
    j["integration"] = {{"h", 0.01}, {"horizon", 100.0}, {"decimation", 10}};
    j["initial_conditions"] = {{"position_range", 5.0}, {"observer", "measurement"}};
    j["seed"] = 1;
    return j;
}

Json published_table_scenario_json() {
    Json j = default_scenario_json();
    j["trigger"]["iota"] = 560.0;
    j["trigger"]["eta"] = 0.001;
    j["trigger"]["varsigma"] = 579.6;
    j["adaptive"]["dbar"] = 3.0;
    return j;
}

Json gains_to_json(const GainSet& g) {
    const auto& sc = g.structure;
    const auto& s = g.scalars;
    return Json{{"P", matrix_to(g.P)},
                {"Q", matrix_to(g.Q)},
                {"X", matrix_to(g.X)},
                {"K", matrix_to(g.K)},
                {"G", matrix_to(g.G)},
                {"Gamma", matrix_to(g.Gamma)},
                {"c", g.c},
                {"kappa", g.kappa},
                {"chi", g.chi},
                {"epsilon", g.epsilon},
                {"agents", sc.agents},
                {"s", sc.graphs},
                {"lambda2", sc.lambda2},
                {"lambdaM", sc.lambdaM},
                {"lambdaM_FFT", sc.lambdaM_FFT},
                {"PiBar", sc.pi_bar},
                {"PiBreve", sc.pi_breve},
                {"tau", sc.tau},
                {"dbar", vector_to(s.dbar)},
                {"o", vector_to(s.o)},
                {"upsilon", vector_to(s.upsilon)},
                {"iota", vector_to(s.iota)},
                {"eta", vector_to(s.eta)},
                {"varsigma", vector_to(s.varsigma)},
                {"beta", vector_to(s.beta)},
                {"varpi0", vector_to(s.varpi0)},
                {"d0", vector_to(s.d0)},
                {"rho", g.rho},
                {"ctilde", g.ctilde},
                {"bound", g.bound},
                {"observer_delta", g.observer_delta},
                {"riccati_residual", g.riccati_residual}};
}

GainSet gains_from_json(const Json& j) {
    try {
        GainSet g;
        g.P = matrix_from(j.at("P"), "P");
        g.Q = matrix_from(j.at("Q"), "Q");
        g.X = matrix_from(j.at("X"), "X");
        g.K = matrix_from(j.at("K"), "K");
        g.G = matrix_from(j.at("G"), "G");
        g.Gamma = matrix_from(j.at("Gamma"), "Gamma");
        g.c = j.at("c").get<double>();
        g.kappa = j.at("kappa").get<double>();
        g.chi = j.at("chi").get<double>();
        g.epsilon = j.value("epsilon", 0.0);
        auto& sc = g.structure;
        sc.agents = j.at("agents").get<int>();
        sc.graphs = j.at("s").get<int>();
        sc.lambda2 = j.at("lambda2").get<double>();
        sc.lambdaM = j.at("lambdaM").get<double>();
        sc.lambdaM_FFT = j.at("lambdaM_FFT").get<double>();
        sc.pi_bar = j.at("PiBar").get<double>();
        sc.pi_breve = j.at("PiBreve").get<double>();
        sc.tau = j.at("tau").get<double>();
        const int n = sc.agents;
        g.scalars = ProtocolScalars{per_agent(j, "dbar", n),    per_agent(j, "o", n),      per_agent(j, "upsilon", n),
                                    per_agent(j, "iota", n),    per_agent(j, "eta", n),    per_agent(j, "varsigma", n),
                                    per_agent(j, "beta", n),    per_agent(j, "varpi0", n), per_agent(j, "d0", n)};
        g.rho = j.at("rho").get<double>();
        g.ctilde = j.at("ctilde").get<double>();
        g.bound = j.at("bound").get<double>();
        g.observer_delta = j.value("observer_delta", 0.0);
        g.riccati_residual = j.value("riccati_residual", 0.0);
        return g;
    } catch (const Json::exception& e) {
        throw ConfigError(std::string("gains schema error: ") + e.what());
    }
}

GainSet load_gains(const std::filesystem::path& path) { return gains_from_json(parse_json_text(read_text_file(path))); }

Json report_to_json(const VerificationReport& r) {
    Json m = Json::array();
    for (const auto& c : r.matrices)
        m.push_back({{"name", c.name}, {"margin", c.margin}, {"norm", c.norm}, {"relative", c.relative},
                     {"pass", c.pass}});
    Json s = Json::array();
    for (const auto& c : r.scalars)
        s.push_back({{"name", c.name}, {"slack", c.slack}, {"threshold", c.threshold}, {"agent", c.agent + 1},
                     {"pass", c.pass}});
    return Json{{"P_positive", r.P_positive}, {"Q_positive", r.Q_positive}, {"chi", r.chi},
                {"matrix_conditions", m},    {"scalar_conditions", s},     {"feasible", r.feasible},
                {"certified", r.certified}};
}

Json metrics_to_json(const Metrics& m) {
    Json j;
    j["protocol"] = m.protocol;
    j["steady_state_pos_error"] = m.steady_state_pos_error;
    j["trigger_counts"] = m.trigger_counts;
    j["total_triggers"] = m.total_triggers;
    j["min_inter_event"] = m.min_inter_event;
    j["mean_inter_event"] = m.mean_inter_event;
    j["d_final"] = m.d_final ? vector_to(*m.d_final) : Json(nullptr);
    j["varpi_min"] = m.varpi_min ? Json(*m.varpi_min) : Json(nullptr);
    j["occupancy"] = vector_to(m.occupancy);
    j["ms_delta_tail"] = m.ms_delta_tail;
    j["mean_delta_tail"] = m.mean_delta_tail;
    j["lyapunov_v1_initial"] = m.lyapunov_v1_initial;
    j["lyapunov_v1_tail"] = m.lyapunov_v1_tail;
    j["threshold_bound_ratio"] = m.threshold_bound_ratio ? Json(*m.threshold_bound_ratio) : Json(nullptr);
    j["attack_energy_max"] = m.attack_energy_max;
    j["attack_energy_ok"] = m.attack_energy_ok;
    return j;
}

std::string format_report(const VerificationReport& r) {
    std::ostringstream out;
    out << std::setprecision(6);
    out << "P positive definite: " << (r.P_positive ? "TRUE" : "FALSE") << '\n';
    if (!r.P_positive) {
        out << "verdict: FAIL\n";
        return out.str();
    }
    for (const auto& c : r.matrices) {
        out << c.name << ": margin " << c.margin << " (relative " << c.relative << ") " << (c.pass ? "TRUE" : "FALSE")
            << '\n';
        if (c.name == "cond_P") out << "Q positive definite: " << (r.Q_positive ? "TRUE" : "FALSE") << '\n';
    }
    if (r.Q_positive) {
        out << "chi: " << r.chi << '\n';
        for (const auto& c : r.scalars)
            out << c.name << ": " << (c.pass ? "TRUE" : "FALSE") << " (slack " << c.slack << ", threshold "
                << c.threshold << ", agent " << c.agent + 1 << ")\n";
    }
    out << "certified margins: " << (r.certified ? "TRUE" : "FALSE") << '\n';
    out << "verdict: " << (r.feasible ? "PASS" : "FAIL") << '\n';
    return out.str();
}

std::vector<std::string> trace_columns(int n, int m) {
    std::vector<std::string> cols{"t", "agent_id"};
    for (int k = 1; k <= n; ++k) cols.push_back("x" + std::to_string(k));
    for (int k = 1; k <= n; ++k) cols.push_back("xhat" + std::to_string(k));
    for (int k = 1; k <= m; ++k) cols.push_back("u" + std::to_string(k));
    for (const char* c : {"d", "varpi", "triggered", "alpha", "sigma", "delta_pos_norm"}) cols.emplace_back(c);
    return cols;
}

void write_trace_csv(const std::filesystem::path& path, const TimeSeries& ts) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    if (ts.samples() == 0) return;
    const int n = static_cast<int>(ts.x[0].rows());
    const int m = static_cast<int>(ts.u[0].rows());
    const int agents = static_cast<int>(ts.x[0].cols());
    const auto cols = trace_columns(n, m);
    for (std::size_t c = 0; c < cols.size(); ++c) out << (c ? "," : "") << cols[c];
    out << '\n';
    out << std::setprecision(std::numeric_limits<double>::max_digits10);
    for (std::size_t k = 0; k < ts.samples(); ++k) {
        for (int i = 0; i < agents; ++i) {
            out << ts.t[k] << ',' << i + 1;
            for (int r = 0; r < n; ++r) out << ',' << ts.x[k](r, i);
            for (int r = 0; r < n; ++r) out << ',' << ts.xhat[k](r, i);
            for (int r = 0; r < m; ++r) out << ',' << ts.u[k](r, i);
            out << ',' << ts.d[k](i) << ',' << ts.varpi[k](i) << ',' << ts.triggered[k](i) << ','
                << ts.alpha[k](i) << ',' << ts.sigma[k] + 1 << ',' << ts.delta_pos_norm[k](i) << '\n';
        }
    }
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

std::size_t check_trace_csv(const std::filesystem::path& path, int n, int m) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    std::string line;
    std::getline(in, line);
    const auto cols = trace_columns(n, m);
    std::string expected;
    for (std::size_t c = 0; c < cols.size(); ++c) expected += (c ? "," : "") + cols[c];
    if (line != expected) throw std::runtime_error("trace header mismatch");
    std::size_t rows = 0;
    while (std::getline(in, line)) {
        std::stringstream ss(line);
        std::string cell;
        std::size_t count = 0;
        while (std::getline(ss, cell, ',')) {
            std::size_t used = 0;
            (void)std::stod(cell, &used);
            if (used != cell.size()) throw std::runtime_error("non-numeric cell in trace");
            ++count;
        }
        if (count != cols.size()) throw std::runtime_error("trace row has wrong column count");
        ++rows;
    }
    return rows;
}

}  // namespace etc
