// SPDX-License-Identifier: Apache-2.0

#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "qoc/allocator.hpp"

namespace qoc::alloc {

namespace {

using network::SlotKind;

std::string v(const char* family, int i) { return std::string(family) + "_" + std::to_string(i); }
std::string v(const char* family, int i, int j) { return v(family, i) + "_" + std::to_string(j); }

/// Linear expression printed in LP syntax, wrapped every few terms.
class Expr {
 public:
  Expr& add(double coef, std::string name) {
    terms_.emplace_back(coef, std::move(name));
    return *this;
  }

  std::string str() const {
    std::ostringstream out;
    for (std::size_t k = 0; k < terms_.size(); ++k) {
      const auto& [c, name] = terms_[k];
      if (k > 0 && k % 8 == 0) out << "\n   ";
      out << (c < 0 ? " - " : (k == 0 ? " " : " + "));
      const double a = c < 0 ? -c : c;
      if (a != 1.0) out << format_decimal(a) << ' ';
      out << name;
    }
    return out.str();
  }

 private:
  std::vector<std::pair<double, std::string>> terms_;
};

class Model {
 public:
  void row(const std::string& name, const Expr& e, const char* sense, double rhs) {
    rows_ << ' ' << name << ':' << e.str() << ' ' << sense << ' ' << format_decimal(rhs) << '\n';
  }
  void bound(const std::string& name, double lo, double hi) {
    bounds_ << ' ' << format_decimal(lo) << " <= " << name << " <= " << format_decimal(hi) << '\n';
  }
  void fix(const std::string& name, double value) {
    bounds_ << ' ' << name << " = " << format_decimal(value) << '\n';
  }
  void general(const std::string& name) { generals_.push_back(name); }
  void binary(const std::string& name) { binaries_.push_back(name); }

  std::string str(const std::string& header, bool maximize, const Expr& objective) const {
    std::ostringstream out;
    out << header << (maximize ? "Maximize\n" : "Minimize\n") << " obj:" << objective.str() << '\n'
        << "Subject To\n" << rows_.str() << "Bounds\n" << bounds_.str();
    list(out, "General", generals_);
    list(out, "Binary", binaries_);
    out << "End\n";
    return out.str();
  }

 private:
  static void list(std::ostringstream& out, const char* title, const std::vector<std::string>& names) {
    if (names.empty()) return;
    out << title << '\n';
    for (std::size_t k = 0; k < names.size(); ++k) {
      out << ' ' << names[k] << ((k % 10 == 9 || k + 1 == names.size()) ? "\n" : "");
    }
  }

  std::ostringstream rows_;
  std::ostringstream bounds_;
  std::vector<std::string> generals_;
  std::vector<std::string> binaries_;
};

/// First/last markers of one robot in one direction: S is the selected
/// scheduled slot (selector W), bracketed against every slot's indicator.
void markers(Model& m, int i, int M, const std::vector<int>& slots, const char* z, const char* s_first,
             const char* s_last, const char* w_first, const char* w_last, int phi) {
  struct Marker {
    const char* s;
    const char* w;
    bool is_first;
  };
  for (const auto& [s, w, is_first] : {Marker{s_first, w_first, true}, Marker{s_last, w_last, false}}) {
    Expr def;
    def.add(1, v(s, i));
    Expr one;
    for (int j : slots) {
      def.add(-j, v(w, i, j));
      one.add(1, v(w, i, j));
      m.row(v(w, i, j) + "_le_z", Expr().add(1, v(w, i, j)).add(-1, v(z, i, j)), "<=", 0);
      m.binary(v(w, i, j));
      if (is_first) {
        // s <= j + M (1 - z)
        m.row(v(s, i) + "_le_" + std::to_string(j), Expr().add(1, v(s, i)).add(M, v(z, i, j)), "<=", j + M);
      } else {
        // s >= j - M (1 - z)
        m.row(v(s, i) + "_ge_" + std::to_string(j), Expr().add(1, v(s, i)).add(-M, v(z, i, j)), ">=", j - M);
      }
    }
    m.row(v(s, i) + "_def", def, "=", 0);
    m.row(v(s, i) + "_one", one, "=", 1);
    m.bound(v(s, i), 1, phi);
    m.general(v(s, i));
  }
}

}  // namespace

std::string export_lp(const Instance& inst, Scheme scheme) {
  inst.validate();
  const int n = inst.n_robots;
  const int phi = inst.phi();
  const int M = inst.effective_big_m();
  const int R = inst.frame.capacity;
  const double slot_ms = inst.frame.slot_duration_ms();
  const auto& entries = inst.table.entries;
  const bool pair_mode = inst.table.mode == table::TableMode::pair;

  std::vector<int> ul, dl;
  for (int j = 1; j <= phi; ++j) (inst.frame.kind(j) == SlotKind::uplink ? ul : dl).push_back(j);

  Model m;

  // Per-slot capacity.
  for (int j = 1; j <= phi; ++j) {
    const bool up = inst.frame.kind(j) == SlotKind::uplink;
    Expr e;
    for (int i = 1; i <= n; ++i) e.add(1, v(up ? "x" : "y", i, j));
    m.row(std::string(up ? "cap_ul_" : "cap_dl_") + std::to_string(j), e, "<=", R);
  }

  for (int i = 1; i <= n; ++i) {
    // Totals and link indicators.
    Expr xs, ys;
    for (int j = 1; j <= phi; ++j) {
      const bool up = inst.frame.kind(j) == SlotKind::uplink;
      xs.add(1, v("x", i, j));
      ys.add(1, v("y", i, j));
      m.general(v("x", i, j));
      m.general(v("y", i, j));
      m.binary(v("zu", i, j));
      m.binary(v("zd", i, j));
      if (up) {
        m.bound(v("x", i, j), 0, inst.ul_need);
        m.fix(v("y", i, j), 0);
        m.fix(v("zd", i, j), 0);
        m.row(v("link_ul_hi", i, j), Expr().add(1, v("x", i, j)).add(-inst.ul_need, v("zu", i, j)), "<=", 0);
        m.row(v("link_ul_lo", i, j), Expr().add(1, v("x", i, j)).add(-1, v("zu", i, j)), ">=", 0);
      } else {
        m.bound(v("y", i, j), 0, inst.dl_need);
        m.fix(v("x", i, j), 0);
        m.fix(v("zu", i, j), 0);
        m.row(v("link_dl_hi", i, j), Expr().add(1, v("y", i, j)).add(-inst.dl_need, v("zd", i, j)), "<=", 0);
        m.row(v("link_dl_lo", i, j), Expr().add(1, v("y", i, j)).add(-1, v("zd", i, j)), ">=", 0);
      }
    }
    m.row(v("total_ul", i), xs, "=", inst.ul_need);
    m.row(v("total_dl", i), ys, "=", inst.dl_need);

    markers(m, i, M, ul, "zu", "sfu", "slu", "wfu", "wlu", phi);
    markers(m, i, M, dl, "zd", "sfd", "sld", "wfd", "wld", phi);
  }

  // Global first uplink slot A = min sfu and last uplink slot B = max slu.
  Expr va_one, vb_one;
  for (int i = 1; i <= n; ++i) {
    m.row(v("smin_le", i), Expr().add(1, "smin").add(-1, v("sfu", i)), "<=", 0);
    m.row(v("smin_ge", i), Expr().add(1, "smin").add(-1, v("sfu", i)).add(-M, v("va", i)), ">=", -M);
    m.row(v("smax_ge", i), Expr().add(1, "smax").add(-1, v("slu", i)), ">=", 0);
    m.row(v("smax_le", i), Expr().add(1, "smax").add(-1, v("slu", i)).add(M, v("vb", i)), "<=", M);
    va_one.add(1, v("va", i));
    vb_one.add(1, v("vb", i));
    m.binary(v("va", i));
    m.binary(v("vb", i));
  }
  m.row("smin_one", va_one, "=", 1);
  m.row("smax_one", vb_one, "=", 1);
  m.bound("smin", 1, phi);
  m.bound("smax", 1, phi);
  m.general("smin");
  m.general("smax");

  // Delays, delay selection and QoC.
  for (int i = 1; i <= n; ++i) {
    m.row(v("gate", i), Expr().add(1, v("sfd", i)).add(-1, "smax"), ">=", 1);
    m.row(v("de_def", i), Expr().add(1, v("de", i)).add(-1, v("sld", i)).add(1, "smin"), "=", 0);
    m.row(v("da_def", i), Expr().add(1, v("da", i)).add(-1, v("sfd", i)).add(1, "smax"), "=", 0);
    m.bound(v("de", i), 0, phi);
    m.bound(v("da", i), 1, phi);
    m.general(v("de", i));
    m.general(v("da", i));

    Expr pick, q;
    q.add(1, v("q", i));
    for (std::size_t l = 0; l < entries.size(); ++l) {
      const int li = static_cast<int>(l) + 1;
      const std::string th = v("th", i, li);
      const int de = entries[l].e2e_slots;
      const int da = entries[l].alloc_slots;
      pick.add(1, th);
      if (entries[l].qoc != 0.0) q.add(-entries[l].qoc, th);
      m.binary(th);
      // d <= delta + (phi - delta)(1 - th) and d >= delta * th
      m.row(v("de_hi", i, li), Expr().add(1, v("de", i)).add(phi - de, th), "<=", phi);
      m.row(v("de_lo", i, li), Expr().add(1, v("de", i)).add(-de, th), ">=", 0);
      if (pair_mode) {
        m.row(v("da_hi", i, li), Expr().add(1, v("da", i)).add(phi - da, th), "<=", phi);
        m.row(v("da_lo", i, li), Expr().add(1, v("da", i)).add(-da, th), ">=", 0);
      }
      if (scheme == Scheme::min_delay_stable && !(entries[l].qoc > 0.0)) m.fix(th, 0);
    }
    m.row(v("pick", i), pick, "=", 1);
    m.row(v("q_def", i), q, "=", 0);
    m.bound(v("q", i), 0, 1);
  }

  Expr objective;
  for (int i = 1; i <= n; ++i) {
    if (scheme == Scheme::max_qoc) {
      objective.add(1, v("q", i));
    } else {
      objective.add(slot_ms, v("de", i));
    }
  }
  const bool maximize = scheme == Scheme::max_qoc || scheme == Scheme::max_delay;

  std::ostringstream header;
  header << "\\ QoC slot allocation, scheme " << scheme_name(scheme) << '\n'
         << "\\ robots " << n << ", slots " << phi << " (" << inst.frame.pattern_string() << " x"
         << inst.frame.repetitions << "), R " << R << ", U " << inst.ul_need << ", D " << inst.dl_need
         << ", M " << M << '\n';
  return m.str(header.str(), maximize, objective);
}

}  // namespace qoc::alloc
