#pragma once

#include <string>
#include <vector>

namespace cmfmts {

/// Fraction of positions where pred equals truth. Throws compute_error on a
/// length mismatch or empty input.
double accuracy(const std::vector<std::string>& pred, const std::vector<std::string>& truth);

/// Accuracies of k methods on N datasets; NA cells are allowed and treated
/// as accuracy 0 everywhere. Values above 1 anywhere mark the whole table as
/// percentages, which are normalized to [0, 1] on load.
struct ResultsTable {
  std::vector<std::string> methods;
  std::vector<std::string> datasets;
  std::vector<double> cells; // row-major datasets x methods, NA = NaN

  double at(std::size_t dataset, std::size_t method) const {
    return cells[dataset * methods.size() + method];
  }
};

/// Long-form CSV `dataset,method,accuracy` (accuracy may be `NA`).
ResultsTable read_results_csv(const std::string& text);
ResultsTable read_results_csv_file(const std::string& path);

/// Per-dataset ranks by descending accuracy (ties get the mean rank, NA
/// counts as 0), averaged over datasets.
std::vector<double> average_ranks(const ResultsTable& table);

/// How win/loss/tie is counted per dataset.
///   SharedWin — every method achieving the maximum scores a win; a tie is a
///               shared maximum (so wins + losses = N and ties <= wins).
///   StrictWin — only a unique maximum is a win; a shared maximum scores a
///               tie for each sharer (so wins + losses + ties = N).
enum class TieConvention { SharedWin, StrictWin };

struct WinLossTie {
  std::size_t wins = 0, losses = 0, ties = 0;
};

std::vector<WinLossTie> win_loss_tie(const ResultsTable& table,
                                     TieConvention convention = TieConvention::SharedWin);

struct FriedmanNemenyi {
  double chi2 = 0; // Friedman statistic over average ranks
  double cd = 0;   // Nemenyi critical difference at the requested alpha
};

/// alpha must be 0.05 or 0.10 (the embedded Studentized-range constants
/// cover k = 2..20). Throws input_error otherwise.
FriedmanNemenyi friedman_nemenyi(const ResultsTable& table, double alpha = 0.05);

/// Maximal groups of methods whose rank spread is below cd, built greedily
/// over methods sorted by average rank; groups contained in another group
/// are merged away. Each group lists method indices.
std::vector<std::vector<std::size_t>> cd_cliques(const std::vector<double>& avg_ranks,
                                                 double cd);

/// `method,avg_rank,wins,losses,ties` in the table's method order.
std::string summary_csv(const ResultsTable& table,
                        TieConvention convention = TieConvention::SharedWin);

/// Plot-ready critical-difference data: `kind,key,value` rows — one `cd`
/// row, one `rank` row per method, one `clique` row per group with methods
/// joined by `|`.
std::string cd_diagram_csv(const ResultsTable& table, double alpha = 0.05);

} // namespace cmfmts
