#include "ebandit/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <system_error>

namespace ebandit {

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    return out;
}

int decision_of(double r1, double r2, double tie_tol) {
    if (r1 < r2 - tie_tol) return 1;
    if (r2 < r1 - tie_tol) return 2;
    return 0;
}

double parse_double(std::string_view s) {
    double v = 0.0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size())
        throw std::runtime_error("bad numeric field in CSV: " + std::string(s));
    return v;
}

}  // namespace

std::string format_double(double v) {
    char buf[64];
    const auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc()) throw std::runtime_error("format_double failed");
    return std::string(buf, p);
}

void write_report(const std::string& path,
                  const std::vector<std::pair<std::string, std::string>>& entries) {
    std::ofstream out = open_out(path);
    for (const auto& [k, v] : entries) out << k << "=" << v << "\n";
}

void export_value_table_csv(const std::string& path, const ValueTable& table,
                            double tie_tol) {
    std::ofstream out = open_out(path);
    out << "n1,n2,x1,x2,r1,r2,r,decision\n";
    for (const auto& sl : table.slices()) {
        for (int i = 0; i < sl.ax1.count; ++i) {
            for (int j = 0; j < sl.ax2.count; ++j) {
                const double r1 = sl.value_r1(i, j);
                const double r2 = sl.value_r2(i, j);
                out << sl.n1 << ',' << sl.n2 << ',' << format_double(sl.ax1.coord(i))
                    << ',' << format_double(sl.ax2.coord(j)) << ',' << format_double(r1)
                    << ',' << format_double(r2) << ',' << format_double(sl.value_r(i, j))
                    << ',' << decision_of(r1, r2, tie_tol) << "\n";
            }
        }
    }
}

void export_scaled_field_csv(const std::string& path, const ScaledField& field,
                             double tie_tol) {
    std::ofstream out = open_out(path);
    out << "t1,t2,x1,x2,tr1,tr2,tr,decision\n";
    const ScaledAxis& ax = field.axis();
    for (const auto& sl : field.slices()) {
        const double t1 = sl.i1 * field.eps();
        const double t2 = sl.i2 * field.eps();
        for (int i = 0; i < ax.count; ++i) {
            for (int j = 0; j < ax.count; ++j) {
                const std::size_t at = static_cast<std::size_t>(i) * ax.count + j;
                out << format_double(t1) << ',' << format_double(t2) << ','
                    << format_double(ax.coord(i)) << ',' << format_double(ax.coord(j))
                    << ',' << format_double(sl.r1[at]) << ',' << format_double(sl.r2[at])
                    << ',' << format_double(sl.r[at]) << ','
                    << decision_of(sl.r1[at], sl.r2[at], tie_tol) << "\n";
            }
        }
    }
}

std::vector<ValueTableCsvRow> read_value_table_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open for reading: " + path);
    std::string line;
    if (!std::getline(in, line) || line != "n1,n2,x1,x2,r1,r2,r,decision")
        throw std::runtime_error("unexpected CSV header in " + path);
    std::vector<ValueTableCsvRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string_view> f;
        std::string_view rest = line;
        while (true) {
            const std::size_t pos = rest.find(',');
            if (pos == std::string_view::npos) {
                f.push_back(rest);
                break;
            }
            f.push_back(rest.substr(0, pos));
            rest.remove_prefix(pos + 1);
        }
        if (f.size() != 8) throw std::runtime_error("bad CSV row in " + path);
        ValueTableCsvRow r;
        r.n1 = static_cast<int>(parse_double(f[0]));
        r.n2 = static_cast<int>(parse_double(f[1]));
        r.x1 = parse_double(f[2]);
        r.x2 = parse_double(f[3]);
        r.r1 = parse_double(f[4]);
        r.r2 = parse_double(f[5]);
        r.r = parse_double(f[6]);
        r.decision = static_cast<int>(parse_double(f[7]));
        rows.push_back(r);
    }
    return rows;
}

void write_compare_csv(const std::string& path, const std::vector<CompareCsvRow>& rows) {
    std::ofstream out = open_out(path);
    out << "eps,sup_distance_rel,risk_exponential,risk_gaussian\n";
    for (const auto& r : rows)
        out << format_double(r.eps) << ',' << format_double(r.sup_distance_rel) << ','
            << format_double(r.risk_exponential) << ',' << format_double(r.risk_gaussian)
            << "\n";
}

}  // namespace ebandit
