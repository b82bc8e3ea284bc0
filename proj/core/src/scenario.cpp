#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "ptsfd/harness.hpp"
#include "ptsfd/sha3.hpp"

namespace ptsfd::harness {

namespace {

std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    parts.push_back(cur);
    return parts;
}

double parse_double(const std::string& s, std::size_t line) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument("trailing");
        return v;
    } catch (const std::exception&) {
        throw ParseError("line " + std::to_string(line) + ": expected a number, got '" + s + "'");
    }
}

std::uint64_t parse_u64(const std::string& s, std::size_t line) {
    try {
        std::size_t pos = 0;
        const unsigned long long v = std::stoull(s, &pos);
        if (pos != s.size()) throw std::invalid_argument("trailing");
        return v;
    } catch (const std::exception&) {
        throw ParseError("line " + std::to_string(line) + ": expected an integer, got '" + s +
                         "'");
    }
}

std::vector<double> parse_prior(const std::string& s, std::size_t line) {
    if (s == "uniform") return {};
    std::vector<double> probs;
    for (const std::string& tok : split(s, ','))
        probs.push_back(parse_double(trim(tok), line));
    return probs;
}

WorkerSpec parse_worker_spec(const std::string& value, std::size_t line) {
    WorkerSpec spec;
    std::istringstream is(value);
    std::string token;
    while (is >> token) {
        const auto eq = token.find('=');
        if (eq == std::string::npos)
            throw ParseError("line " + std::to_string(line) + ": worker attribute '" + token +
                             "' is not key=value");
        const std::string key = token.substr(0, eq);
        const std::string val = token.substr(eq + 1);
        if (key == "strategy") {
            if (val == "honest")
                spec.strategy = agents::StrategyKind::Honest;
            else if (val == "heuristic")
                spec.strategy = agents::StrategyKind::Heuristic;
            else if (val == "strategic")
                spec.strategy = agents::StrategyKind::Strategic;
            else
                throw ParseError("line " + std::to_string(line) + ": unknown strategy '" + val +
                                 "'");
        } else if (key == "effort") {
            spec.effort = parse_double(val, line);
        } else if (key == "accuracy") {
            spec.accuracy = parse_double(val, line);
        } else if (key == "threshold") {
            if (val == "none") {
                spec.threshold_mode = agents::ThresholdMode::None;
            } else if (val == "rational") {
                spec.threshold_mode = agents::ThresholdMode::Rational;
            } else if (val.rfind("fixed:", 0) == 0) {
                spec.threshold_mode = agents::ThresholdMode::Fixed;
                spec.fixed_threshold = parse_double(val.substr(6), line);
            } else {
                throw ParseError("line " + std::to_string(line) + ": unknown threshold '" + val +
                                 "'");
            }
        } else if (key == "map") {
            if (val == "collude") {
                spec.report_map.clear();  // filled in per n_classes at run time
            } else {
                for (const std::string& pair : split(val, ',')) {
                    const auto colon = pair.find(':');
                    if (colon == std::string::npos)
                        throw ParseError("line " + std::to_string(line) +
                                         ": report map entry '" + pair + "' is not from:to");
                    const std::uint64_t from = parse_u64(pair.substr(0, colon), line);
                    const std::uint64_t to = parse_u64(pair.substr(colon + 1), line);
                    if (spec.report_map.size() <= from) spec.report_map.resize(from + 1, 0);
                    spec.report_map[from] = static_cast<ClassLabel>(to);
                }
            }
        } else if (key == "deposit") {
            spec.deposit = static_cast<std::int64_t>(parse_u64(val, line));
        } else if (key == "withhold") {
            spec.withhold_reveal = val == "1" || val == "true";
        } else if (key == "falsify_counts") {
            spec.falsify_counts = val == "1" || val == "true";
        } else {
            throw ParseError("line " + std::to_string(line) + ": unknown worker attribute '" +
                             key + "'");
        }
    }
    return spec;
}

std::string render_worker_spec(const WorkerSpec& s) {
    std::ostringstream os;
    switch (s.strategy) {
        case agents::StrategyKind::Honest: os << "strategy=honest"; break;
        case agents::StrategyKind::Heuristic: os << "strategy=heuristic"; break;
        case agents::StrategyKind::Strategic: os << "strategy=strategic"; break;
    }
    os << " effort=" << fmt_double(s.effort);
    if (s.accuracy) os << " accuracy=" << fmt_double(*s.accuracy);
    switch (s.threshold_mode) {
        case agents::ThresholdMode::None: break;
        case agents::ThresholdMode::Rational: os << " threshold=rational"; break;
        case agents::ThresholdMode::Fixed:
            os << " threshold=fixed:" << fmt_double(s.fixed_threshold);
            break;
    }
    if (s.strategy == agents::StrategyKind::Strategic) {
        if (s.report_map.empty()) {
            os << " map=collude";
        } else {
            os << " map=";
            for (std::size_t c = 0; c < s.report_map.size(); ++c)
                os << (c ? "," : "") << c << ":" << s.report_map[c];
        }
    }
    if (s.deposit >= 0) os << " deposit=" << s.deposit;
    if (s.withhold_reveal) os << " withhold=1";
    if (s.falsify_counts) os << " falsify_counts=1";
    return os.str();
}

}  // namespace

datagen::ClassPrior Scenario::public_prior_or_uniform() const {
    if (public_prior.empty()) return datagen::ClassPrior::uniform(n_classes);
    return {public_prior};
}

datagen::ClassPrior Scenario::private_prior_or_uniform() const {
    if (private_prior.empty()) return datagen::ClassPrior::uniform(n_classes);
    return {private_prior};
}

double Scenario::round_lambda(std::size_t round) const {
    if (lambda_schedule.empty()) return lambda;
    return lambda_schedule[std::min(round, lambda_schedule.size() - 1)];
}

void Scenario::validate() const {
    if (n_workers < 2) throw ValidationError("scenario needs n_workers >= 2");
    if (m_samples == 0) throw ValidationError("scenario needs m_samples >= 1");
    if (rounds == 0) throw ValidationError("scenario needs rounds >= 1");
    params().validate();
    if (!(alpha > 0.0)) throw ValidationError("alpha must be > 0");
    if (deposit < 0) throw ValidationError("deposit must be >= 0");
    if (!(settlement_scale >= 0.0)) throw ValidationError("settlement_scale must be >= 0");
    if (t_max_reveal <= t_max_commit)
        throw ValidationError("t_max_reveal must exceed t_max_commit");
    if (!public_prior.empty() && public_prior.size() != n_classes)
        throw ValidationError("public prior length != n_classes");
    if (!private_prior.empty() && private_prior.size() != n_classes)
        throw ValidationError("private prior length != n_classes");
    if (!lambda_schedule.empty() && lambda_schedule.size() != rounds)
        throw ValidationError("lambda_schedule length != rounds");
    for (double l : lambda_schedule)
        if (!(l > 0.0)) throw ValidationError("lambda_schedule entries must be > 0");
    if (workers.size() != n_workers)
        throw ValidationError("worker spec list length != n_workers");
    noise.validate();
    if (assignment_mode == datagen::AssignmentMode::KPeers &&
        (assignment_k < 2 || assignment_k > n_workers))
        throw ValidationError("kpeers k must lie in [2, n_workers]");
    for (const WorkerSpec& w : workers) {
        if (w.effort < 0.0 || w.effort > 1.0)
            throw ValidationError("worker effort must lie in [0,1]");
        if (w.accuracy && (*w.accuracy < 0.0 || *w.accuracy > 1.0))
            throw ValidationError("worker accuracy must lie in [0,1]");
        if (!w.report_map.empty()) {
            if (w.report_map.size() != n_classes)
                throw ValidationError("strategic report map must cover all classes");
            for (const ClassLabel c : w.report_map)
                if (c >= n_classes)
                    throw ValidationError("report map target out of class range");
        }
    }
}

std::string Scenario::canonical_form() const {
    std::map<std::string, std::string> kv;
    kv["n_workers"] = std::to_string(n_workers);
    kv["m_samples"] = std::to_string(m_samples);
    kv["n_classes"] = std::to_string(n_classes);
    kv["alpha"] = fmt_double(alpha);
    kv["lambda"] = fmt_double(lambda);
    kv["beta"] = fmt_double(beta);
    kv["assignment"] = assignment_mode == datagen::AssignmentMode::Full
                           ? "full"
                           : "kpeers:" + std::to_string(assignment_k);
    auto render_prior = [](const std::vector<double>& p) {
        if (p.empty()) return std::string("uniform");
        std::string s;
        for (std::size_t i = 0; i < p.size(); ++i) s += (i ? "," : "") + fmt_double(p[i]);
        return s;
    };
    kv["public_prior"] = render_prior(public_prior);
    kv["private_prior"] = render_prior(private_prior);
    kv["private_samples_per_worker"] = std::to_string(private_samples_per_worker);
    kv["seed"] = std::to_string(seed);
    kv["rounds"] = std::to_string(rounds);
    std::string sched;
    for (std::size_t i = 0; i < lambda_schedule.size(); ++i)
        sched += (i ? "," : "") + fmt_double(lambda_schedule[i]);
    kv["lambda_schedule"] = sched;
    kv["deposit"] = std::to_string(deposit);
    kv["settlement_scale"] = fmt_double(settlement_scale);
    kv["t_max_commit"] = std::to_string(t_max_commit);
    kv["t_max_reveal"] = std::to_string(t_max_reveal);
    kv["noise_level"] = fmt_double(noise.noise_level);
    kv["noise_concentration"] = fmt_double(noise.noise_concentration);
    kv["count_saturation"] = fmt_double(noise.count_saturation);
    kv["confidence_concentration"] = fmt_double(noise.confidence_concentration);
    kv["cost_low"] = fmt_double(cost_low);
    kv["cost_high"] = fmt_double(cost_high);
    kv["cost_fixed"] = fmt_double(cost_fixed);
    for (std::size_t i = 0; i < workers.size(); ++i) {
        char key[32];
        std::snprintf(key, sizeof(key), "worker.%06zu", i);
        kv[key] = render_worker_spec(workers[i]);
    }
    std::string out;
    for (const auto& [k, v] : kv) out += k + "=" + v + "\n";
    return out;
}

std::string Scenario::digest() const {
    const std::string canon = canonical_form();
    const auto hash = crypto::Sha3_256::hash(
        {reinterpret_cast<const std::uint8_t*>(canon.data()), canon.size()});
    return crypto::to_hex(hash);
}

Scenario Scenario::parse(const std::string& text) {
    Scenario sc;
    WorkerSpec default_spec;
    std::map<std::size_t, WorkerSpec> overrides;

    std::istringstream is(text);
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(is, raw)) {
        ++line_no;
        const std::string line = trim(raw);
        if (line.empty() || line[0] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ParseError("line " + std::to_string(line_no) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));

        if (key == "n_workers") sc.n_workers = parse_u64(value, line_no);
        else if (key == "m_samples") sc.m_samples = parse_u64(value, line_no);
        else if (key == "n_classes")
            sc.n_classes = static_cast<std::uint32_t>(parse_u64(value, line_no));
        else if (key == "alpha") sc.alpha = parse_double(value, line_no);
        else if (key == "lambda") sc.lambda = parse_double(value, line_no);
        else if (key == "beta") sc.beta = parse_double(value, line_no);
        else if (key == "assignment") {
            if (value == "full") {
                sc.assignment_mode = datagen::AssignmentMode::Full;
            } else if (value.rfind("kpeers:", 0) == 0) {
                sc.assignment_mode = datagen::AssignmentMode::KPeers;
                sc.assignment_k = parse_u64(value.substr(7), line_no);
            } else {
                throw ParseError("line " + std::to_string(line_no) +
                                 ": assignment must be full or kpeers:K");
            }
        } else if (key == "public_prior") sc.public_prior = parse_prior(value, line_no);
        else if (key == "private_prior") sc.private_prior = parse_prior(value, line_no);
        else if (key == "private_samples_per_worker")
            sc.private_samples_per_worker = parse_u64(value, line_no);
        else if (key == "seed") sc.seed = parse_u64(value, line_no);
        else if (key == "rounds") sc.rounds = parse_u64(value, line_no);
        else if (key == "lambda_schedule") {
            sc.lambda_schedule.clear();
            if (!value.empty())
                for (const std::string& tok : split(value, ','))
                    sc.lambda_schedule.push_back(parse_double(trim(tok), line_no));
        } else if (key == "deposit")
            sc.deposit = static_cast<std::int64_t>(parse_u64(value, line_no));
        else if (key == "settlement_scale") sc.settlement_scale = parse_double(value, line_no);
        else if (key == "t_max_commit") sc.t_max_commit = parse_u64(value, line_no);
        else if (key == "t_max_reveal") sc.t_max_reveal = parse_u64(value, line_no);
        else if (key == "noise_level") sc.noise.noise_level = parse_double(value, line_no);
        else if (key == "noise_concentration")
            sc.noise.noise_concentration = parse_double(value, line_no);
        else if (key == "count_saturation")
            sc.noise.count_saturation = parse_double(value, line_no);
        else if (key == "confidence_concentration")
            sc.noise.confidence_concentration = parse_double(value, line_no);
        else if (key == "cost_low") sc.cost_low = parse_double(value, line_no);
        else if (key == "cost_high") sc.cost_high = parse_double(value, line_no);
        else if (key == "cost_fixed") sc.cost_fixed = parse_double(value, line_no);
        else if (key == "worker.default") default_spec = parse_worker_spec(value, line_no);
        else if (key.rfind("worker.", 0) == 0) {
            const std::uint64_t idx = parse_u64(key.substr(7), line_no);
            overrides[idx] = parse_worker_spec(value, line_no);
        } else {
            throw ParseError("line " + std::to_string(line_no) + ": unknown key '" + key + "'");
        }
    }

    sc.workers.assign(sc.n_workers, default_spec);
    for (const auto& [idx, spec] : overrides) {
        if (idx >= sc.n_workers)
            throw ParseError("worker." + std::to_string(idx) + " exceeds n_workers");
        sc.workers[idx] = spec;
    }
    sc.validate();
    return sc;
}

Scenario Scenario::parse_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open scenario config: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse(buf.str());
}

}  // namespace ptsfd::harness
