#pragma once

#include <string>
#include <utility>
#include <vector>

#include "ebandit/limit.hpp"
#include "ebandit/value_table.hpp"

namespace ebandit {

// Shortest decimal string that round-trips the double exactly.
std::string format_double(double v);

// key=value lines, one per entry, in order.
void write_report(const std::string& path,
                  const std::vector<std::pair<std::string, std::string>>& entries);

// Columns: n1,n2,x1,x2,r1,r2,r,decision with decision in {1, 2, 0 = tie}.
void export_value_table_csv(const std::string& path, const ValueTable& table,
                            double tie_tol = 1e-12);

// Columns: t1,t2,x1,x2,tr1,tr2,tr,decision over the retained slices.
void export_scaled_field_csv(const std::string& path, const ScaledField& field,
                             double tie_tol = 1e-12);

struct ValueTableCsvRow {
    int n1 = 0;
    int n2 = 0;
    double x1 = 0.0;
    double x2 = 0.0;
    double r1 = 0.0;
    double r2 = 0.0;
    double r = 0.0;
    int decision = 0;
};

std::vector<ValueTableCsvRow> read_value_table_csv(const std::string& path);

struct CompareCsvRow {
    double eps = 0.0;
    double sup_distance_rel = 0.0;
    double risk_exponential = 0.0;
    double risk_gaussian = 0.0;
};

void write_compare_csv(const std::string& path, const std::vector<CompareCsvRow>& rows);

}  // namespace ebandit
