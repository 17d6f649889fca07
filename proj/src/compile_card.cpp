#include <vector>

#include "nesykc/compile.hpp"

namespace nesykc {

// Cell (j, c) accepts assignments of Y_1..Y_j with exactly / at most / at
// least c ones. Cells outside 0 <= c <= min(j, l) are constants; the others
// are decision nodes on Y_j:
//   cell(j, c) = OR(AND(Y_j, cell(j-1, c-1)), AND(not Y_j, cell(j-1, c)))
// LE and GE only differ from EQ in which out-of-grid cells are TRUE.
Circuit compile_card(const Theory& theory, const CompileOptions& options) {
  if (theory.language() != Language::Card) fail(ErrorKind::InvalidInput, "compile_card expects a card theory");
  const auto& card = theory.card_payload();
  const long n = static_cast<long>(card.n);
  const long l = static_cast<long>(card.bound);
  const CardOp op = card.op;

  CircuitBuilder b(theory.vars());
  auto constant_cell = [&](long j, long c) -> std::optional<bool> {
    switch (op) {
      case CardOp::Eq:
        if (c < 0 || c > j) return false;
        if (j == 0) return c == 0;
        return std::nullopt;
      case CardOp::Le:
        if (c < 0) return false;
        if (c >= j) return true;
        return std::nullopt;
      case CardOp::Ge:
        if (c <= 0) return true;
        if (c > j) return false;
        return std::nullopt;
    }
    return std::nullopt;
  };

  // Mark the cells reachable from the root (n, l), then build them bottom-up.
  std::vector<std::vector<char>> needed(n + 1, std::vector<char>(l + 1, 0));
  if (!constant_cell(n, l)) needed[n][l] = 1;
  for (long j = n; j >= 1; --j)
    for (long c = 0; c <= l; ++c) {
      if (!needed[j][c]) continue;
      for (long cc : {c - 1, c})
        if (cc >= 0 && !constant_cell(j - 1, cc)) needed[j - 1][cc] = 1;
    }

  std::vector<std::vector<NodeId>> cell(n + 1, std::vector<NodeId>(l + 1, 0));
  auto get = [&](long j, long c) {
    if (auto k = constant_cell(j, c)) return b.constant(*k);
    return cell[j][c];
  };
  for (long j = 1; j <= n; ++j)
    for (long c = 0; c <= l; ++c)
      if (needed[j][c]) cell[j][c] = b.decision(static_cast<std::size_t>(j - 1), get(j - 1, c - 1), get(j - 1, c));

  Circuit raw = std::move(b).build(get(n, l), {true, true, false});
  return options.trim ? trim(raw) : raw;
}

}  // namespace nesykc
