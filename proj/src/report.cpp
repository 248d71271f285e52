#include <fstream>
#include <map>

#include <fmt/format.h>

#include "creativity/errors.hpp"
#include "creativity/experiments.hpp"

namespace creativity {

namespace {

std::ofstream open_output(const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(fmt::format("cannot write {}", path.string()));
    return out;
}

std::string file_safe(std::string_view name) {
    std::string out;
    for (char c : name) out.push_back(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' ? c : '_');
    return out;
}

std::string csv_field(std::string_view text) {
    if (text.find_first_of(",\"\n") == std::string_view::npos) return std::string(text);
    std::string out = "\"";
    for (char c : text) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

}  // namespace

std::string format_real(double value) { return fmt::format("{}", value); }

void write_rmse_csv(const std::filesystem::path& path, const ExperimentReport& report) {
    auto out = open_output(path);
    out << "label,combination,model,rmse\n";
    for (const auto& c : report.rmse)
        out << csv_field(c.label) << ',' << c.combination << ',' << to_string(c.model) << ',' << format_real(c.rmse)
            << '\n';
}

void write_rmse_tables(const std::filesystem::path& dir, const ExperimentReport& report) {
    std::vector<std::string> labels;
    std::vector<std::string> combos;
    std::vector<ModelKind> models;
    for (const auto& c : report.rmse) {
        if (std::find(labels.begin(), labels.end(), c.label) == labels.end()) labels.push_back(c.label);
        if (std::find(combos.begin(), combos.end(), c.combination) == combos.end()) combos.push_back(c.combination);
        if (std::find(models.begin(), models.end(), c.model) == models.end()) models.push_back(c.model);
    }
    for (const auto& label : labels) {
        auto out = open_output(dir / fmt::format("rmse_{}.csv", file_safe(label)));
        out << "Combination";
        for (auto m : models) out << ',' << to_string(m);
        out << '\n';
        for (const auto& combo : combos) {
            out << combo;
            for (auto m : models) {
                const auto v = report.rmse_of(label, combo, m);
                out << ',' << (v ? format_real(*v) : "");
            }
            out << '\n';
        }
        out << "Improvement%";
        for (auto m : models) {
            out << ',';
            for (const auto& row : report.improvements)
                if (row.label == label && row.model == m) out << format_real(row.improvement_percent);
        }
        out << '\n';
    }
}

void write_improvements_csv(const std::filesystem::path& path, const ExperimentReport& report) {
    auto out = open_output(path);
    out << "label,model,baseline_rmse,best_combination,best_rmse,improvement_percent\n";
    for (const auto& r : report.improvements)
        out << csv_field(r.label) << ',' << to_string(r.model) << ',' << format_real(r.baseline_rmse) << ','
            << r.best_combination << ',' << format_real(r.best_rmse) << ',' << format_real(r.improvement_percent)
            << '\n';
}

void write_correlations_csv(const std::filesystem::path& path, const std::vector<CorrelationCell>& cells) {
    auto out = open_output(path);
    out << "attribute,kernel,measure,label,pearson\n";
    for (const auto& c : cells)
        out << csv_field(c.attribute) << ',' << to_string(c.kernel) << ',' << c.measure << ',' << csv_field(c.label)
            << ',' << (c.r ? format_real(*c.r) : "") << '\n';
}

void write_heatmaps(const std::filesystem::path& dir, const std::vector<CorrelationCell>& cells) {
    std::vector<std::string> measures;
    std::vector<std::string> labels;
    std::vector<std::string> rows;
    std::map<std::tuple<std::string, std::string, std::string>, std::optional<double>> lookup;
    for (const auto& c : cells) {
        const auto row = fmt::format("{}:{}", c.attribute, to_string(c.kernel));
        if (std::find(measures.begin(), measures.end(), c.measure) == measures.end()) measures.push_back(c.measure);
        if (std::find(labels.begin(), labels.end(), c.label) == labels.end()) labels.push_back(c.label);
        if (std::find(rows.begin(), rows.end(), row) == rows.end()) rows.push_back(row);
        lookup[{c.measure, row, c.label}] = c.r;
    }
    for (const auto& measure : measures) {
        auto out = open_output(dir / fmt::format("heatmap_{}.csv", measure));
        out << "attribute_kernel";
        for (const auto& l : labels) out << ',' << csv_field(l);
        out << '\n';
        for (const auto& row : rows) {
            out << csv_field(row);
            for (const auto& l : labels) {
                auto it = lookup.find({measure, row, l});
                out << ',' << (it != lookup.end() && it->second ? format_real(*it->second) : "");
            }
            out << '\n';
        }
    }
}

void write_report(const std::filesystem::path& dir, const ExperimentReport& report) {
    write_rmse_csv(dir / "rmse.csv", report);
    write_rmse_tables(dir, report);
    write_improvements_csv(dir / "improvements.csv", report);
    write_correlations_csv(dir / "correlations.csv", report.correlations);
    write_heatmaps(dir, report.correlations);
    auto models = open_output(dir / "models.json");
    models << report.models.dump(2) << '\n';
}

}  // namespace creativity
