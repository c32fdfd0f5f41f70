#pragma once

#include <string>
#include <vector>

#include "rstar/model.hpp"

namespace rstar {

/// Parsed CSV table: header names plus numeric cells (RFC-4180 quoting,
/// comma separator, dot decimal). Throws data_error on malformed input.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};

CsvTable read_csv(const std::string& path);

/// Build a Dataset from a CSV file: the named column is the response, all
/// remaining columns are covariates in file order, with an optional leading
/// intercept column of ones.
Dataset dataset_from_csv(const std::string& path, const std::string& response_column,
                         bool add_intercept);

/// Position in the final design matrix of the interest column, given either
/// a header name or a numeric index into the design columns.
int resolve_interest(const CsvTable& table, const std::string& response_column,
                     const std::string& interest, bool add_intercept);

/// 17-significant-digit decimal form; round-trips doubles exactly.
std::string format_double(double x);

/// Write content to a temp file in the same directory and rename onto the
/// target, so a failed run never leaves a partial artifact behind.
void atomic_write(const std::string& path, const std::string& content);

}  // namespace rstar
