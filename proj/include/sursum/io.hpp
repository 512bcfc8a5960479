#pragma once

#include "sursum/lossgap.hpp"
#include "sursum/ssvs.hpp"

#include <map>
#include <string>

namespace sursum {

// Comma-delimited numeric table with a header row.
struct NamedTable {
  std::vector<std::string> names;
  Matrix values;
};

NamedTable read_csv(const std::string& path);

// Loads the response and predictor files into a validated Dataset.
Dataset ingest(const std::string& responses_path,
               const std::string& predictors_path);

// Flat key = value file; '#' starts a comment.  Unknown keys are the caller's
// problem, duplicates keep the last value.
std::map<std::string, std::string> parse_key_value_file(const std::string& path);

void write_draws_csv(const std::string& path,
                     const std::vector<PosteriorDraw>& draws);
void write_moments_csv(const std::string& path, const MomentSet& moments);
void write_path_csv(const std::string& path, const SummaryPath& summary_path);
void write_tradeoff_csv(const std::string& path, const LossGapResult& result);

// DOT graph: every response as a gray filled node, predictors with at least
// one edge as white filled nodes, one undirected edge per support pair.
void emit_graph(const std::vector<std::pair<int, int>>& support,
                const std::vector<std::string>& response_names,
                const std::vector<std::string>& predictor_names,
                const std::string& out_path);

}  // namespace sursum
