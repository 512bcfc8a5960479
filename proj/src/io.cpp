#include "sursum/io.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace sursum {

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream stream(line);
  while (std::getline(stream, cell, ',')) {
    // trim surrounding whitespace
    auto begin = cell.find_first_not_of(" \t\r");
    auto end = cell.find_last_not_of(" \t\r");
    cells.push_back(begin == std::string::npos
                        ? std::string()
                        : cell.substr(begin, end - begin + 1));
  }
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

std::string quote_dot(const std::string& name) {
  std::string quoted = "\"";
  for (char c : name) {
    if (c == '"' || c == '\\') quoted += '\\';
    quoted += c;
  }
  quoted += '"';
  return quoted;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IngestError("cannot open for writing: " + path);
  return out;
}

}  // namespace

NamedTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IngestError("cannot open: " + path);
  std::string line;
  if (!std::getline(in, line))
    throw IngestError("empty file: " + path);
  NamedTable table;
  table.names = split_line(line);
  const std::size_t width = table.names.size();
  if (width == 0) throw IngestError("no header columns in " + path);

  std::vector<double> values;
  std::size_t rows = 0;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto cells = split_line(line);
    if (cells.size() != width) {
      std::ostringstream msg;
      msg << path << " row " << line_no << ": expected " << width
          << " columns, found " << cells.size();
      throw IngestError(msg.str());
    }
    for (std::size_t c = 0; c < width; ++c) {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(cells[c], &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != cells[c].size() || cells[c].empty()) {
        std::ostringstream msg;
        msg << path << " row " << line_no << ", column '" << table.names[c]
            << "': cannot parse '" << cells[c] << "' as a number";
        throw IngestError(msg.str());
      }
      values.push_back(v);
    }
    ++rows;
  }
  if (rows == 0) throw IngestError("no data rows in " + path);
  table.values.resize(rows, width);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < width; ++c)
      table.values(r, c) = values[r * width + c];
  return table;
}

Dataset ingest(const std::string& responses_path,
               const std::string& predictors_path) {
  NamedTable responses = read_csv(responses_path);
  NamedTable predictors = read_csv(predictors_path);
  if (responses.values.rows() != predictors.values.rows()) {
    std::ostringstream msg;
    msg << "row count mismatch: " << responses_path << " has "
        << responses.values.rows() << " rows, " << predictors_path << " has "
        << predictors.values.rows();
    throw IngestError(msg.str());
  }
  Dataset data;
  data.Y = responses.values;
  data.X = predictors.values;
  data.response_names = responses.names;
  data.predictor_names = predictors.names;
  try {
    validate(data);
  } catch (const InvalidParameterError& e) {
    throw IngestError(std::string("invalid dataset: ") + e.what());
  }
  return data;
}

std::map<std::string, std::string> parse_key_value_file(
    const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config: " + path);
  std::map<std::string, std::string> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    auto nonblank = line.find_first_not_of(" \t\r");
    if (nonblank == std::string::npos) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) {
      std::ostringstream msg;
      msg << path << " line " << line_no << ": expected key = value";
      throw ConfigError(msg.str());
    }
    auto trim = [](std::string s) {
      auto b = s.find_first_not_of(" \t\r");
      auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty()) {
      std::ostringstream msg;
      msg << path << " line " << line_no << ": empty key";
      throw ConfigError(msg.str());
    }
    out[key] = value;
  }
  return out;
}

void write_draws_csv(const std::string& path,
                     const std::vector<PosteriorDraw>& draws) {
  if (draws.empty()) throw InvalidParameterError("no draws to write");
  auto out = open_out(path);
  const auto& first = draws.front().params;
  const int p = static_cast<int>(first.beta.rows());
  const int q = static_cast<int>(first.beta.cols());

  out << "iteration";
  for (int i = 0; i < p; ++i) out << ",alpha_" << i + 1;
  for (int j = 0; j < q; ++j)
    for (int i = 0; i < p; ++i) out << ",beta_" << i + 1 << "_" << j + 1;
  for (int j = 0; j < q; ++j) out << ",b_" << j + 1;
  for (int j = 0; j < q; ++j) out << ",psi_tilde_" << j + 1;
  for (int c = 0; c < p; ++c)
    for (int r = 0; r < p; ++r) out << ",sigma_x_" << r + 1 << "_" << c + 1;
  for (int i = 0; i < p; ++i) out << ",mu_x_" << i + 1;
  for (int j = 0; j < q; ++j) out << ",mu_y_" << j + 1;
  out << "\n";

  for (const auto& draw : draws) {
    out << draw.iteration;
    for (int i = 0; i < p; ++i) out << "," << draw.params.alpha[i];
    for (int j = 0; j < q; ++j)
      for (int i = 0; i < p; ++i)
        out << "," << format_number(draw.params.beta(i, j));
    for (int j = 0; j < q; ++j) out << "," << format_number(draw.params.b[j]);
    for (int j = 0; j < q; ++j)
      out << "," << format_number(draw.params.psi_tilde[j]);
    Matrix sigma_x = draw.params.sigma_x();
    for (int c = 0; c < p; ++c)
      for (int r = 0; r < p; ++r) out << "," << format_number(sigma_x(r, c));
    for (int i = 0; i < p; ++i) out << "," << format_number(draw.params.mu_x[i]);
    for (int j = 0; j < q; ++j) out << "," << format_number(draw.params.mu_y[j]);
    out << "\n";
  }
}

void write_moments_csv(const std::string& path, const MomentSet& moments) {
  auto out = open_out(path);
  out << "matrix,row,col,value\n";
  auto dump = [&out](const char* name, const Matrix& m) {
    for (int r = 0; r < m.rows(); ++r)
      for (int c = 0; c < m.cols(); ++c)
        out << name << "," << r + 1 << "," << c + 1 << ","
            << format_number(m(r, c)) << "\n";
  };
  dump("A", moments.A);
  dump("S", moments.S);
  dump("M", moments.M);
}

void write_path_csv(const std::string& path, const SummaryPath& summary_path) {
  auto out = open_out(path);
  out << "lambda_index,lambda,response,predictor,value\n";
  for (std::size_t g = 0; g < summary_path.lambdas.size(); ++g) {
    const Matrix& gamma = summary_path.gammas[g];
    for (int j = 0; j < gamma.rows(); ++j)
      for (int i = 0; i < gamma.cols(); ++i)
        out << g + 1 << "," << format_number(summary_path.lambdas[g]) << ","
            << j + 1 << "," << i + 1 << "," << format_number(gamma(j, i))
            << "\n";
  }
}

void write_tradeoff_csv(const std::string& path, const LossGapResult& result) {
  auto out = open_out(path);
  out << "lambda,delta_mean,band_lower,band_upper,pi,support_size\n";
  for (std::size_t g = 0; g < result.lambdas.size(); ++g)
    out << format_number(result.lambdas[g]) << ","
        << format_number(result.delta_mean[g]) << ","
        << format_number(result.band_lower[g]) << ","
        << format_number(result.band_upper[g]) << ","
        << format_number(result.pi[g]) << "," << result.support_size[g]
        << "\n";
}

void emit_graph(const std::vector<std::pair<int, int>>& support,
                const std::vector<std::string>& response_names,
                const std::vector<std::string>& predictor_names,
                const std::string& out_path) {
  for (const auto& [response, predictor] : support)
    if (response < 0 ||
        response >= static_cast<int>(response_names.size()) ||
        predictor < 0 ||
        predictor >= static_cast<int>(predictor_names.size()))
      throw InvalidParameterError("support pair outside the name range");

  std::set<int> connected;
  for (const auto& [response, predictor] : support) connected.insert(predictor);

  auto out = open_out(out_path);
  out << "graph summary {\n";
  out << "  node [shape=ellipse];\n";
  for (const auto& name : response_names)
    out << "  " << quote_dot(name) << " [style=filled, fillcolor=gray];\n";
  for (int predictor : connected)
    out << "  " << quote_dot(predictor_names[predictor])
        << " [style=filled, fillcolor=white];\n";
  for (const auto& [response, predictor] : support)
    out << "  " << quote_dot(response_names[response]) << " -- "
        << quote_dot(predictor_names[predictor]) << ";\n";
  out << "}\n";
}

}  // namespace sursum
