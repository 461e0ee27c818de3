#include "pmqkd/tally.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <stdexcept>

namespace pmqkd {

const char* setting_name(Intensity a) {
    switch (a) {
        case Intensity::vacuum: return "vac";
        case Intensity::weak: return "w";
        case Intensity::signal: return "s";
    }
    throw std::logic_error("bad Intensity");
}

Intensity setting_from_name(std::string_view name) {
    if (name == "vac") return Intensity::vacuum;
    if (name == "w") return Intensity::weak;
    if (name == "s") return Intensity::signal;
    throw std::invalid_argument("unknown intensity setting: " + std::string(name));
}

TallyTable::TallyTable(int phase_slices) : phase_slices_(phase_slices) {
    if (phase_slices < 2 || phase_slices % 2 != 0)
        throw std::invalid_argument("TallyTable: phase_slices must be even >= 2");
    cells_.resize(3 * static_cast<std::size_t>(groups()));
}

TallyCell& TallyTable::at(Intensity a, int j) {
    if (j < 0 || j >= groups()) throw std::out_of_range("TallyTable: group index");
    return cells_[static_cast<std::size_t>(static_cast<int>(a)) * groups() + j];
}

const TallyCell& TallyTable::at(Intensity a, int j) const {
    return const_cast<TallyTable*>(this)->at(a, j);
}

std::uint64_t TallyTable::sent(Intensity a) const {
    std::uint64_t n = 0;
    for (int j = 0; j < groups(); ++j) n += at(a, j).sent;
    return n;
}

std::uint64_t TallyTable::clicked(Intensity a) const {
    std::uint64_t n = 0;
    for (int j = 0; j < groups(); ++j) n += at(a, j).clicked;
    return n;
}

std::uint64_t TallyTable::sent(Intensity a, const std::vector<int>& group_set) const {
    std::uint64_t n = 0;
    for (int j : group_set) n += at(a, j).sent;
    return n;
}

std::uint64_t TallyTable::clicked(Intensity a, const std::vector<int>& group_set) const {
    std::uint64_t n = 0;
    for (int j : group_set) n += at(a, j).clicked;
    return n;
}

void TallyTable::merge(const TallyTable& other) {
    if (other.phase_slices_ != phase_slices_)
        throw std::invalid_argument("TallyTable::merge: phase_slices mismatch");
    for (std::size_t i = 0; i < cells_.size(); ++i) {
        cells_[i].sent += other.cells_[i].sent;
        cells_[i].clicked += other.cells_[i].clicked;
        cells_[i].bit_errors += other.cells_[i].bit_errors;
    }
}

void TallyTable::validate() const {
    for (const auto& c : cells_) {
        if (c.clicked > c.sent) throw std::invalid_argument("TallyTable: clicked > sent");
        if (c.bit_errors > c.clicked)
            throw std::invalid_argument("TallyTable: bit_errors > clicked");
    }
}

std::string TallyTable::to_csv() const {
    std::string out = "setting,j_s,sent,clicked,bit_errors\n";
    std::array<Intensity, 3> order = kAllSettings;
    std::sort(order.begin(), order.end(), [](Intensity x, Intensity y) {
        return std::string_view(setting_name(x)) < std::string_view(setting_name(y));
    });
    char line[128];
    for (Intensity a : order) {
        for (int j = 0; j < groups(); ++j) {
            const TallyCell& c = at(a, j);
            std::snprintf(line, sizeof line, "%s,%d,%llu,%llu,%llu\n", setting_name(a), j,
                          static_cast<unsigned long long>(c.sent),
                          static_cast<unsigned long long>(c.clicked),
                          static_cast<unsigned long long>(c.bit_errors));
            out += line;
        }
    }
    return out;
}

namespace {
std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (true) {
        std::size_t pos = s.find(sep, start);
        if (pos == std::string_view::npos) {
            parts.push_back(s.substr(start));
            return parts;
        }
        parts.push_back(s.substr(start, pos - start));
        start = pos + 1;
    }
}

std::uint64_t parse_u64(std::string_view s) {
    std::uint64_t v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size())
        throw std::invalid_argument("tally csv: bad count '" + std::string(s) + "'");
    return v;
}
} // namespace

TallyTable TallyTable::from_csv(std::string_view text) {
    struct Row {
        Intensity a;
        int j;
        TallyCell c;
    };
    std::vector<Row> rows;
    int max_group = -1;
    bool header = true;
    for (std::string_view line : split(text, '\n')) {
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.empty()) continue;
        if (header) {
            if (line != "setting,j_s,sent,clicked,bit_errors")
                throw std::invalid_argument("tally csv: unexpected header");
            header = false;
            continue;
        }
        auto f = split(line, ',');
        if (f.size() != 5) throw std::invalid_argument("tally csv: expected 5 columns");
        Row r;
        r.a = setting_from_name(f[0]);
        r.j = static_cast<int>(parse_u64(f[1]));
        r.c.sent = parse_u64(f[2]);
        r.c.clicked = parse_u64(f[3]);
        r.c.bit_errors = parse_u64(f[4]);
        max_group = std::max(max_group, r.j);
        rows.push_back(r);
    }
    if (max_group < 0) throw std::invalid_argument("tally csv: no data rows");
    TallyTable t(2 * (max_group + 1));
    if (rows.size() != static_cast<std::size_t>(3 * t.groups()))
        throw std::invalid_argument("tally csv: wrong row count");
    for (const Row& r : rows) t.at(r.a, r.j) = r.c;
    t.validate();
    return t;
}

} // namespace pmqkd
