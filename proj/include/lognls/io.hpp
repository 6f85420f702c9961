#ifndef LOGNLS_IO_HPP
#define LOGNLS_IO_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "lognls/category.hpp"

namespace lognls {

/// records.csv: "eps,a,seed_id,lambda,energy,bary_x[,bary_y],dist_to_M,v_at_max,converged",
/// 17 significant digits, '\n' line endings. `dim` selects the barycenter columns.
void write_records_csv(std::ostream& os, const std::vector<ExperimentRecord>& records, int dim);
void write_records_csv(const std::string& path, const std::vector<ExperimentRecord>& records, int dim);

/// Check rows as "name,lhs,relation,rhs,margin,pass".
void write_checks_csv(const std::string& path, const std::vector<CheckRow>& rows);

/// Git blob object id: SHA-1 of "blob <size>\0<content>", lowercase hex.
std::string git_blob_hash(const std::string& content);

void write_json(const std::string& path, const nlohmann::json& j);

struct Series {
    std::string name;
    std::vector<double> x;
    std::vector<double> y;
};

/// Polyline chart with markers, axes, tick labels and a legend.
std::string svg_line_chart(const std::string& title, const std::string& x_label, const std::string& y_label,
                           const std::vector<Series>& series);
void write_text(const std::string& path, const std::string& text);

}  // namespace lognls

#endif  // LOGNLS_IO_HPP
