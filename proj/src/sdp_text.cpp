#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "emv/sdp.hpp"

namespace emv {

namespace {

constexpr const char* kMagic = "emv-sdp";
constexpr int kVersion = 1;

void write_row(std::ostream& os, const std::vector<SparseTerm>& terms) {
  for (const auto& t : terms) os << ' ' << t.index << ' ' << t.coef;
}

class LineReader {
 public:
  explicit LineReader(std::istream& is) : is_(is) {}

  // Next non-empty, non-comment line.
  std::istringstream next(const char* expecting) {
    std::string line;
    while (std::getline(is_, line)) {
      ++line_no_;
      const auto p = line.find_first_not_of(" \t\r");
      if (p == std::string::npos || line[p] == '#') continue;
      return std::istringstream(line);
    }
    fail(std::string("unexpected end of input, expected ") + expecting);
  }

  [[noreturn]] void fail(const std::string& why) const {
    throw std::runtime_error("sdp text line " + std::to_string(line_no_) + ": " + why);
  }

  void expect_word(std::istringstream& ls, const std::string& word) {
    std::string w;
    if (!(ls >> w) || w != word) fail("expected '" + word + "'");
  }

  template <class T>
  T read(std::istringstream& ls, const char* what) {
    T v{};
    if (!(ls >> v)) fail(std::string("cannot read ") + what);
    return v;
  }

  std::vector<SparseTerm> read_terms(std::istringstream& ls, std::size_t nnz) {
    std::vector<SparseTerm> out(nnz);
    for (auto& t : out) {
      t.index = read<std::size_t>(ls, "index");
      t.coef = read<double>(ls, "coefficient");
    }
    return out;
  }

 private:
  std::istream& is_;
  std::size_t line_no_ = 0;
};

}  // namespace

void write_sdp(std::ostream& os, const SdpProblem& p) {
  os << std::setprecision(17);
  os << kMagic << ' ' << kVersion << '\n';
  os << "nvars " << p.num_vars << " order " << p.order << " sense "
     << (p.sense == Sense::Minimize ? "min" : "max") << " offset " << p.objective_offset << '\n';
  os << "measures " << p.layout.size() << '\n';
  for (const auto& m : p.layout) {
    os << m.name << ' ' << m.offset << ' ' << m.length << ' ' << m.space.arity();
    for (std::size_t i = 0; i < m.space.arity(); ++i)
      os << ' ' << m.space.name(i) << ' ' << m.space.bounds(i).lo << ' ' << m.space.bounds(i).hi;
    os << '\n';
  }
  os << "objective " << p.objective.size();
  write_row(os, p.objective);
  os << '\n';
  for (const auto* rows : {&p.equalities, &p.inequalities}) {
    os << (rows == &p.equalities ? "equalities " : "inequalities ") << rows->size() << '\n';
    for (const auto& r : *rows) {
      os << r.terms.size() << ' ' << r.rhs;
      write_row(os, r.terms);
      os << '\n';
    }
  }
  os << "blocks " << p.blocks.size() << '\n';
  for (const auto& b : p.blocks) {
    std::size_t nnz = 0;
    for (const auto& e : b.map.packed) nnz += e.terms.size() + (e.constant != 0.0 ? 1 : 0);
    os << "block " << b.label << ' ' << b.map.size << ' ' << nnz << '\n';
    for (std::size_t k = 0; k < b.map.packed.size(); ++k) {
      const auto& e = b.map.packed[k];
      if (e.constant != 0.0) os << k << " -1 " << e.constant << '\n';
      for (const auto& t : e.terms) os << k << ' ' << t.index << ' ' << t.coef << '\n';
    }
  }
}

SdpProblem read_sdp(std::istream& is) {
  LineReader in(is);
  SdpProblem p;
  {
    auto ls = in.next("header");
    in.expect_word(ls, kMagic);
    if (in.read<int>(ls, "version") != kVersion) in.fail("unsupported version");
  }
  {
    auto ls = in.next("nvars line");
    in.expect_word(ls, "nvars");
    p.num_vars = in.read<std::size_t>(ls, "nvars");
    in.expect_word(ls, "order");
    p.order = in.read<int>(ls, "order");
    in.expect_word(ls, "sense");
    const auto sense = in.read<std::string>(ls, "sense");
    if (sense != "min" && sense != "max") in.fail("sense must be min or max");
    p.sense = sense == "min" ? Sense::Minimize : Sense::Maximize;
    in.expect_word(ls, "offset");
    p.objective_offset = in.read<double>(ls, "offset");
  }
  {
    auto ls = in.next("measures");
    in.expect_word(ls, "measures");
    const auto n = in.read<std::size_t>(ls, "measure count");
    for (std::size_t i = 0; i < n; ++i) {
      auto ms = in.next("measure layout");
      MeasureLayout m;
      m.name = in.read<std::string>(ms, "name");
      m.offset = in.read<std::size_t>(ms, "offset");
      m.length = in.read<std::size_t>(ms, "length");
      const auto arity = in.read<std::size_t>(ms, "arity");
      std::vector<std::string> names;
      std::vector<Interval> bounds;
      for (std::size_t k = 0; k < arity; ++k) {
        names.push_back(in.read<std::string>(ms, "variable"));
        const double lo = in.read<double>(ms, "lower bound");
        const double hi = in.read<double>(ms, "upper bound");
        bounds.push_back({lo, hi});
      }
      m.space = VariableSpace(std::move(names), std::move(bounds));
      p.layout.push_back(std::move(m));
    }
  }
  {
    auto ls = in.next("objective");
    in.expect_word(ls, "objective");
    p.objective = in.read_terms(ls, in.read<std::size_t>(ls, "nnz"));
  }
  for (auto* rows : {&p.equalities, &p.inequalities}) {
    auto ls = in.next("row section");
    in.expect_word(ls, rows == &p.equalities ? "equalities" : "inequalities");
    const auto n = in.read<std::size_t>(ls, "row count");
    for (std::size_t i = 0; i < n; ++i) {
      auto rs = in.next("row");
      LinearRow r;
      const auto nnz = in.read<std::size_t>(rs, "nnz");
      r.rhs = in.read<double>(rs, "rhs");
      r.terms = in.read_terms(rs, nnz);
      rows->push_back(std::move(r));
    }
  }
  {
    auto ls = in.next("blocks");
    in.expect_word(ls, "blocks");
    const auto n = in.read<std::size_t>(ls, "block count");
    for (std::size_t b = 0; b < n; ++b) {
      auto bs = in.next("block header");
      in.expect_word(bs, "block");
      PsdBlock blk;
      blk.label = in.read<std::string>(bs, "label");
      blk.map.size = in.read<std::size_t>(bs, "size");
      blk.map.packed.resize(packed_size(blk.map.size));
      const auto nnz = in.read<std::size_t>(bs, "nnz");
      for (std::size_t e = 0; e < nnz; ++e) {
        auto es = in.next("block entry");
        const auto k = in.read<std::size_t>(es, "packed index");
        const auto idx = in.read<long long>(es, "variable index");
        const double c = in.read<double>(es, "coefficient");
        if (k >= blk.map.packed.size()) in.fail("packed index out of range");
        if (idx < 0)
          blk.map.packed[k].constant += c;
        else
          blk.map.packed[k].terms.push_back({static_cast<std::size_t>(idx), c});
      }
      for (auto& e : blk.map.packed) e.normalize();
      p.blocks.push_back(std::move(blk));
    }
  }
  p.validate();
  return p;
}

void write_solution(std::ostream& os, const SdpSolution& s) {
  os << std::setprecision(17);
  os << "status " << to_string(s.status) << '\n';
  os << "backend " << s.backend << '\n';
  os << "iterations " << s.iterations << '\n';
  os << "objective " << s.objective << '\n';
  os << "dual_objective " << s.dual_objective << '\n';
  os << "max_equality " << s.residuals.max_equality << '\n';
  os << "min_inequality " << s.residuals.min_inequality << '\n';
  os << "min_psd_eigenvalue " << s.residuals.min_psd_eigenvalue << '\n';
  os << "dual_residual " << s.residuals.dual_residual << '\n';
  os << "relative_gap " << s.residuals.relative_gap << '\n';
  if (s.status == SolveStatus::Infeasible) os << "certificate " << s.certificate << '\n';
  os << "z " << s.z.size() << '\n';
  for (Eigen::Index i = 0; i < s.z.size(); ++i) os << i << ' ' << s.z[i] << '\n';
}

}  // namespace emv
