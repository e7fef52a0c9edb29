#pragma once

#include <iosfwd>
#include <cstddef>
#include <string>
#include <vector>

namespace latentprobe::cli {

/// Exit codes: 0 success (search: threshold reached), 1 error, 2 search
/// stopped on a round cap.
/// Pair/score layout: a "pair\tscore" header, then "(i,j)\t%.8f" per pair
/// in lexicographic order, 1-based.
std::string format_pair_table(std::size_t count, const std::vector<double>& scores, bool as_json = false);

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace latentprobe::cli
