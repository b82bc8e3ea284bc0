#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "ptsfd/harness.hpp"
#include "ptsfd/mechanism.hpp"

namespace ptsfd::harness {

namespace {

constexpr const char* kVotesHeader = "worker_id,sample_id,class";
constexpr const char* kCountsHeader = "worker_id,class,count";

std::uint64_t parse_field_u64(const std::string& s, std::size_t line, const char* what) {
    try {
        std::size_t pos = 0;
        const unsigned long long v = std::stoull(s, &pos);
        if (pos != s.size()) throw std::invalid_argument("trailing");
        return v;
    } catch (const std::exception&) {
        throw ParseError("line " + std::to_string(line) + ": invalid " + what + " '" + s + "'");
    }
}

struct CsvReader {
    std::istringstream is;
    std::size_t line_no = 0;

    explicit CsvReader(const std::string& text) : is(text) {}

    bool next(std::string& out) {
        while (std::getline(is, out)) {
            ++line_no;
            if (!out.empty() && out.back() == '\r') out.pop_back();
            if (out.empty()) continue;
            return true;
        }
        return false;
    }
};

// `# n=.. m=.. classes=..` dimension pins
struct Dims {
    std::uint64_t n = 0, m = 0, classes = 0;
    bool present = false;
};

Dims parse_dims_comment(const std::string& line, std::size_t line_no) {
    Dims d;
    d.present = true;
    std::istringstream is(line.substr(1));
    std::string token;
    while (is >> token) {
        const auto eq = token.find('=');
        if (eq == std::string::npos)
            throw ParseError("line " + std::to_string(line_no) + ": bad dimension token '" +
                             token + "'");
        const std::string key = token.substr(0, eq);
        const std::uint64_t val = parse_field_u64(token.substr(eq + 1), line_no, key.c_str());
        if (key == "n") d.n = val;
        else if (key == "m") d.m = val;
        else if (key == "classes") d.classes = val;
        else
            throw ParseError("line " + std::to_string(line_no) + ": unknown dimension '" + key +
                             "'");
    }
    return d;
}

}  // namespace

std::string export_votes_csv(const VoteMatrix& votes, std::uint32_t n_classes) {
    std::ostringstream os;
    os << "# n=" << votes.n_workers() << " m=" << votes.m_samples() << " classes=" << n_classes
       << "\n";
    os << kVotesHeader << "\n";
    for (std::size_t i = 0; i < votes.n_workers(); ++i)
        for (std::size_t j = 0; j < votes.m_samples(); ++j) {
            const Vote v = votes.at(i, j);
            if (v.is_abstain()) continue;
            os << i << "," << j << "," << v.value() << "\n";
        }
    return os.str();
}

VoteFile parse_votes_csv(const std::string& text) {
    CsvReader reader(text);
    std::string line;
    Dims dims;

    if (!reader.next(line)) throw ParseError("empty vote file");
    if (line[0] == '#') {
        dims = parse_dims_comment(line, reader.line_no);
        if (!reader.next(line)) throw ParseError("vote file has no header");
    }
    if (line != kVotesHeader)
        throw ParseError("line " + std::to_string(reader.line_no) + ": expected header '" +
                         kVotesHeader + "'");

    struct Entry {
        std::uint64_t worker, sample, cls;
    };
    std::vector<Entry> entries;
    std::set<std::pair<std::uint64_t, std::uint64_t>> seen;
    std::uint64_t max_worker = 0, max_sample = 0, max_class = 0;

    while (reader.next(line)) {
        if (line[0] == '#') continue;
        std::vector<std::string> fields;
        std::string cur;
        for (char c : line) {
            if (c == ',') {
                fields.push_back(cur);
                cur.clear();
            } else {
                cur.push_back(c);
            }
        }
        fields.push_back(cur);
        if (fields.size() != 3)
            throw ParseError("line " + std::to_string(reader.line_no) +
                             ": expected 3 fields, got " + std::to_string(fields.size()));
        Entry e{parse_field_u64(fields[0], reader.line_no, "worker_id"),
                parse_field_u64(fields[1], reader.line_no, "sample_id"),
                parse_field_u64(fields[2], reader.line_no, "class")};
        if (e.cls >= Vote::kAbstainRaw)
            throw ParseError("line " + std::to_string(reader.line_no) + ": class " +
                             std::to_string(e.cls) + " out of encodable range");
        if (dims.present) {
            if (e.worker >= dims.n)
                throw ParseError("line " + std::to_string(reader.line_no) + ": worker_id " +
                                 std::to_string(e.worker) + " exceeds n=" +
                                 std::to_string(dims.n));
            if (e.sample >= dims.m)
                throw ParseError("line " + std::to_string(reader.line_no) + ": sample_id " +
                                 std::to_string(e.sample) + " exceeds m=" +
                                 std::to_string(dims.m));
            if (e.cls >= dims.classes)
                throw ParseError("line " + std::to_string(reader.line_no) + ": class " +
                                 std::to_string(e.cls) + " out of range for " +
                                 std::to_string(dims.classes) + " classes");
        }
        if (!seen.insert({e.worker, e.sample}).second)
            throw ParseError("line " + std::to_string(reader.line_no) +
                             ": duplicate (worker,sample) entry " + std::to_string(e.worker) +
                             "," + std::to_string(e.sample));
        max_worker = std::max(max_worker, e.worker);
        max_sample = std::max(max_sample, e.sample);
        max_class = std::max(max_class, e.cls);
        entries.push_back(e);
    }
    if (entries.empty() && !dims.present) throw ParseError("vote file contains no votes");

    VoteFile out;
    const std::size_t n = dims.present ? dims.n : max_worker + 1;
    const std::size_t m = dims.present ? dims.m : max_sample + 1;
    out.n_classes = dims.present ? static_cast<std::uint32_t>(dims.classes)
                                 : static_cast<std::uint32_t>(max_class + 1);
    out.votes = VoteMatrix(n, m);
    for (const auto& e : entries)
        out.votes.set(e.worker, e.sample, Vote::label(static_cast<ClassLabel>(e.cls)));
    out.counts.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
        out.counts.push_back(mechanism::label_count(out.votes.row(i), out.n_classes));
    return out;
}

VoteFile ingest_votes(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open vote file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_votes_csv(buf.str());
}

std::string export_counts_csv(std::span<const LabelCount> counts) {
    std::ostringstream os;
    os << "# n=" << counts.size() << " classes=" << (counts.empty() ? 0 : counts[0].size())
       << "\n";
    os << kCountsHeader << "\n";
    for (std::size_t i = 0; i < counts.size(); ++i)
        for (std::size_t c = 0; c < counts[i].size(); ++c)
            os << i << "," << c << "," << counts[i][c] << "\n";
    return os.str();
}

std::vector<LabelCount> parse_counts_csv(const std::string& text) {
    CsvReader reader(text);
    std::string line;
    Dims dims;

    if (!reader.next(line)) throw ParseError("empty counts file");
    if (line[0] == '#') {
        dims = parse_dims_comment(line, reader.line_no);
        if (!reader.next(line)) throw ParseError("counts file has no header");
    }
    if (line != kCountsHeader)
        throw ParseError("line " + std::to_string(reader.line_no) + ": expected header '" +
                         kCountsHeader + "'");

    std::map<std::uint64_t, std::map<std::uint64_t, std::uint64_t>> table;
    std::uint64_t max_worker = 0, max_class = 0;
    while (reader.next(line)) {
        if (line[0] == '#') continue;
        const auto c1 = line.find(',');
        const auto c2 = c1 == std::string::npos ? std::string::npos : line.find(',', c1 + 1);
        if (c2 == std::string::npos)
            throw ParseError("line " + std::to_string(reader.line_no) + ": expected 3 fields");
        const std::uint64_t worker =
            parse_field_u64(line.substr(0, c1), reader.line_no, "worker_id");
        const std::uint64_t cls =
            parse_field_u64(line.substr(c1 + 1, c2 - c1 - 1), reader.line_no, "class");
        const std::uint64_t count =
            parse_field_u64(line.substr(c2 + 1), reader.line_no, "count");
        if (!table[worker].emplace(cls, count).second)
            throw ParseError("line " + std::to_string(reader.line_no) +
                             ": duplicate (worker,class) count");
        max_worker = std::max(max_worker, worker);
        max_class = std::max(max_class, cls);
    }
    const std::size_t n = dims.present ? dims.n : max_worker + 1;
    const std::size_t k = dims.present ? dims.classes : max_class + 1;
    std::vector<LabelCount> out(n, LabelCount(k, 0));
    for (const auto& [worker, row] : table) {
        if (worker >= n) throw ParseError("counts worker_id exceeds n");
        for (const auto& [cls, count] : row) {
            if (cls >= k) throw ParseError("counts class exceeds |C|");
            out[worker][cls] = static_cast<std::uint32_t>(count);
        }
    }
    return out;
}

std::vector<std::size_t> count_mismatches(const VoteFile& votes,
                                          std::span<const LabelCount> claimed) {
    std::vector<std::size_t> mismatched;
    for (std::size_t i = 0; i < votes.counts.size(); ++i) {
        if (i >= claimed.size() || claimed[i] != votes.counts[i]) mismatched.push_back(i);
    }
    return mismatched;
}

}  // namespace ptsfd::harness
