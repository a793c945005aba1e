// banana: compute, cache, export and verify.
//
//   banana gv-table [--n-max N] [--g-max G] [--format text|csv|json]
//   banana series phi0|chi10|chi12|dt|f_g|schoen [windows] [--format json|csv|text]
//   banana verify [--only name,...] [windows]
//
// Exit codes: 0 pass, 1 identity failure, 2 usage error, 3 window insufficiency.
#include <zlib.h>

#include <CLI11.hpp>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <json.hpp>
#include <sstream>

#include "banana/banana.hpp"

using namespace ban;
namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

constexpr int kPass = 0, kFail = 1, kUsage = 2, kInsufficient = 3;

struct RunConfig {
  int NQ = 4, Nq = 4, Ly = 6, Kt = 12;
  int genus = 2;
  int n_max = 5, g_max = 6;
  std::string cache_dir, format, out, target;
  std::vector<std::string> only;
};

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void validate(const RunConfig& c) {
  if (c.NQ < 1 || c.Nq < 1) throw UsageError("--NQ and --Nq must be positive");
  if (c.Ly < 1 || c.Kt < 1) throw UsageError("--Ly and --Kt must be positive");
  if (c.n_max < 0 || c.g_max < 0) throw UsageError("--n-max and --g-max must be nonnegative");
  if (c.genus < 0 || c.genus > 6) throw UsageError("--genus must lie in 0..6");
}

// ---- cache: one file per key, first line "crc32 <hex>" over the payload

std::string cache_root(const RunConfig& c) {
  if (!c.cache_dir.empty()) return c.cache_dir;
  if (const char* env = std::getenv("BANANA_CACHE_DIR")) return env;
  return ".banana-cache";
}

unsigned long crc_of(const std::string& s) {
  return crc32(crc32(0L, Z_NULL, 0), reinterpret_cast<const Bytef*>(s.data()), static_cast<uInt>(s.size()));
}

std::string cached(const RunConfig& c, const std::string& key, const std::function<std::string()>& compute) {
  const fs::path path = fs::path(cache_root(c)) / (key + ".cache");
  if (std::ifstream in{path, std::ios::binary}) {
    std::string head;
    std::getline(in, head);
    std::stringstream body;
    body << in.rdbuf();
    std::ostringstream want;
    want << "crc32 " << std::hex << crc_of(body.str());
    if (head == want.str()) {
      std::cerr << "cache hit " << path.string() << "\n";
      return body.str();
    }
    std::cerr << "cache corrupt " << path.string() << ", recomputing\n";
  } else {
    std::cerr << "cache miss " << path.string() << "\n";
  }
  const std::string payload = compute();
  std::error_code ec;
  fs::create_directories(path.parent_path(), ec);
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out{tmp, std::ios::binary};
    out << "crc32 " << std::hex << crc_of(payload) << "\n" << payload;
  }
  fs::rename(tmp, path, ec);
  if (ec) std::cerr << "cache write failed: " << ec.message() << "\n";
  return payload;
}

void emit(const RunConfig& c, const std::string& name, const std::string& payload) {
  std::cout << payload;
  if (c.out.empty()) return;
  std::error_code ec;
  fs::create_directories(c.out, ec);
  std::ofstream(fs::path(c.out) / name, std::ios::binary) << payload;
}

std::string ext(const std::string& format) { return format == "text" ? "txt" : format; }

// ---- gv-table

int cmd_gv_table(const RunConfig& c) {
  const std::string fmt = c.format.empty() ? "text" : c.format;
  const std::string key = "gv-n" + std::to_string(c.n_max) + "-g" + std::to_string(c.g_max) + "-" + fmt;
  // The validity and reference comparison always run on a fresh table; only the export is cached.
  GVTable t = gv_tables(c.n_max, c.g_max);
  const std::string payload = cached(c, key, [&] {
    if (fmt == "csv") return t.to_csv();
    if (fmt == "text") return t.render();
    ordered_json doc = ordered_json::array();
    for (const auto& [gd, v] : t.values) {
      Rational r = v / 12;
      doc.push_back({{"g", gd.first}, {"D", gd.second}, {"numerator", r.get_num().get_str()},
                     {"denominator", r.get_den().get_str()}});
    }
    return doc.dump(1) + "\n";
  });
  emit(c, "gv_tables." + ext(fmt), payload);

  bool valid = true, match = true;
  for (const auto& [D, ok] : t.valid)
    if (!ok) {
      valid = false;
      std::cerr << "INSUFFICIENT D=" << D << ": " << t.detail.at(D) << "\n";
    }
  for (bool even : {false, true}) {
    const auto& ref = reference_gv_table(even);
    for (int n = 0; n <= std::min<int>(c.n_max, static_cast<int>(ref.size()) - 1); ++n)
      for (int g = 0; g <= std::min<int>(c.g_max, static_cast<int>(ref[n].size()) - 1); ++g) {
        const int D = even ? 4 * n : 4 * n - 1;
        const Rational got = t.at(g, D) / 12;
        if (got != ref[n][g]) {
          match = false;
          std::cerr << "MISMATCH g=" << g << " D=" << D << ": computed " << got.get_str() << ", reference "
                    << ref[n][g] << "\n";
        }
      }
  }
  if (auto shape = gv_shape_check(t)) {
    match = false;
    std::cerr << "MISMATCH shape: " << *shape << "\n";
  }
  if (!match) {
    std::cerr << "FAIL\n";
    return kFail;
  }
  if (!valid) return kInsufficient;
  std::cerr << "OK\n";
  return kPass;
}

// ---- series

std::string series_json(const MultiSeries& s) {
  // One term per line, so individual coefficients stay greppable.
  ordered_json doc = ordered_json::parse(to_json(s, -1));
  std::ostringstream os;
  os << "{\n \"variables\": " << doc["variables"].dump() << ",\n \"gradings\": " << doc["gradings"].dump()
     << ",\n \"terms\": [";
  bool first = true;
  for (const auto& t : doc["terms"]) {
    os << (first ? "\n  " : ",\n  ") << t.dump();
    first = false;
  }
  os << "\n ],\n \"zeta3_multiple\": " << doc["zeta3_multiple"].dump() << "\n}\n";
  return os.str();
}

std::string series_csv(const MultiSeries& s) {
  std::ostringstream os;
  const Frame& f = s.frame();
  for (const auto& v : f.vars) os << v.name << ",";
  os << "numerator,denominator\n";
  s.for_each([&](const Exps& e, const Rational& c) {
    for (int x : e) os << x << ",";
    os << c.get_num() << "," << c.get_den() << "\n";
  });
  return os.str();
}

int cmd_series(const RunConfig& c) {
  const std::string fmt = c.format.empty() ? "json" : c.format;
  const std::string& tg = c.target;
  std::string key = "series-" + tg + "-NQ" + std::to_string(c.NQ) + "-Nq" + std::to_string(c.Nq) + "-Ly" +
                    std::to_string(c.Ly) + "-Kt" + std::to_string(c.Kt);
  if (tg == "f_g") key += "-g" + std::to_string(c.genus);
  key += "-" + fmt;
  const std::string payload = cached(c, key, [&]() -> std::string {
    MultiSeries s;
    if (tg == "phi0") {
      s = phi0_product(c.Nq, c.Ly, c.Kt);
      if (fmt == "csv") return extract_table(s, c.Ly, c.Kt).to_table();
    } else if (tg == "chi10" || tg == "chi12") {
      s = igusa_chi(tg == "chi10" ? 10 : 12, c.NQ, c.Nq, c.Ly).series;
    } else if (tg == "dt") {
      EllGenTable tab = ellgen_table(std::max(c.Nq, c.NQ * c.NQ / 12 + 1), c.Kt);
      s = dt_partition_function(tab, c.NQ, c.Kt, borcherds_alpha(tab, c.NQ));
    } else if (tg == "f_g") {
      s = gw_potential_ml(c.genus, c.NQ, c.Nq, c.Ly).series;
    } else {
      s = schoen_dt(c.NQ);
    }
    if (fmt == "csv") return series_csv(s);
    if (fmt == "text") return to_string(s, s.size()) + "\n";
    return series_json(s);
  });
  emit(c, tg + "." + ext(fmt), payload);
  return kPass;
}

// ---- verify

struct Outcome {
  int status = kPass;
  std::string detail;
};

Outcome pass(std::string d) { return {kPass, std::move(d)}; }
Outcome fail(std::string d) { return {kFail, std::move(d)}; }

Outcome mismatch(const std::optional<Mismatch>& m, const Frame& f, const std::string& ok) {
  return m ? fail(m->describe(f)) : pass(ok);
}

Outcome check_delta(const RunConfig&) {
  const int N = 30;
  MultiSeries E4 = eisenstein(4, N).series, E6 = eisenstein(6, N).series, E8 = eisenstein(8, N).series;
  const Box box{{0, N}};
  if (auto m = compare_box(delta(N).series, (E4 * E4 * E4 - E6 * E6) * Rational(1, 1728), box))
    return fail("Delta: " + m->describe(E4.frame()));
  if (auto m = compare_box(E8, E4 * E4, box)) return fail("E8: " + m->describe(E4.frame()));
  if (auto m = compare_box(eisenstein(10, N).series, E4 * E6, box)) return fail("E10: " + m->describe(E4.frame()));
  if (auto m = compare_box(eisenstein(14, N).series, E8 * E6, box)) return fail("E14: " + m->describe(E4.frame()));
  return pass("q^" + std::to_string(N));
}

Outcome check_theta(const RunConfig& c) {
  MultiSeries P = phi0_product(c.Nq, c.Ly, c.Kt), T = phi0_theta(c.Nq, c.Ly, c.Kt);
  return mismatch(compare_box(P, T, {{0, c.Nq}, {-c.Ly, c.Ly}, {-c.Kt, c.Kt}}), P.frame(),
                  "q^" + std::to_string(c.Nq) + ", |l| <= " + std::to_string(c.Ly) + ", |k| <= " + std::to_string(c.Kt));
}

Outcome check_chi10(const RunConfig& c) {
  const int M = c.NQ, N = c.Nq, L = c.Ly;
  MultiSeries ml = igusa_chi(10, M, N, L).series, gn = gritsenko_nikulin_chi10(M, N, L).series;
  const Box box{{0, M}, {0, N}, {-L, L}};
  if (auto m = compare_box(ml, gn, box)) return fail("ML vs product: " + m->describe(ml.frame()));
  std::optional<std::string> q0;
  ml.for_each([&](const Exps& e, const Rational&) {
    if (e[0] == 0 && !q0) q0 = "Q^0 term " + format_monomial(ml.frame(), e);
  });
  if (q0) return fail(*q0);
  if (siegel_phi(igusa_chi(10, M, N, L)).series.size()) return fail("Phi(chi10) != 0");
  return pass("Q^" + std::to_string(M) + " q^" + std::to_string(N) + " |l| <= " + std::to_string(L));
}

Outcome check_dmvv(const RunConfig& c) {
  DmvvReport r = dmvv_check(std::min(c.NQ, 3), std::min(c.Nq, 2), std::min(c.Ly, 3), 4, c.Kt);
  if (!r.sufficient) return {kInsufficient, r.detail};
  if (!r.equal) return fail(r.detail);
  return pass(std::to_string(r.compared) + " coefficients");
}

Outcome check_dtbl(const RunConfig& c) {
  const int S = c.NQ, T = std::min(c.Kt, 8);
  EllGenTable tab = ellgen_table(std::max(c.Nq, S * S / 12 + 1), T);
  const int alpha = borcherds_alpha(tab, S);
  MultiSeries dt = dt_partition_function(tab, S, T, alpha);
  MultiSeries bl = borcherds_lift_formal(tab, 12, S, T, alpha);
  if (auto m = compare_shared(dt_to_siegel(dt), bl)) return fail("DT vs lift: " + m->describe(bl.frame()));
  MultiSeries m24 = power(macmahon(T).series, 24);
  for (int k = 0; k <= T; ++k)
    if (dt.coefficient({0, 0, 0, k}) != m24.coefficient({k})) return fail("degree zero at t^" + std::to_string(k));
  return pass("degree <= " + std::to_string(S) + ", t <= " + std::to_string(T));
}

// Siegel window for the genus-g checks: one order below the configured windows.
std::array<int, 3> fg_window(const RunConfig& c) {
  return {std::max(1, c.NQ - 1), std::max(1, c.Nq - 1), std::max(1, c.Ly - 2)};
}

Outcome check_fg(const RunConfig& c) {
  auto [M, N, L] = fg_window(c);
  const Box box{{0, M}, {0, N}, {-L, L}};
  for (int g = 2; g <= 5; ++g) {
    const std::string tag = "g=" + std::to_string(g) + ": ";
    SiegelFJSeries ml = gw_potential_ml(g, M, N, L), cl = gw_potential_closed(g, M, N, L);
    if (!box_known(ml.series, box) || !box_known(cl.series, box)) return {kInsufficient, tag + "window not known"};
    if (auto m = compare_box(ml.series, cl.series, box)) return fail(tag + "ML vs closed: " + m->describe(ml.series.frame()));
    if (ml.series.coefficient({0, 0, 0}) != deg0_fg(g)) return fail(tag + "constant term");
    Index1CoefficientFn psi = psi_coefficients(g, 4 * M * N + 4);
    for (auto& [D, v] : psi.values) v *= 12;
    if (auto bad = spezialschar_check(ml, psi, 2 * g - 2)) return fail(tag + *bad);
  }
  return pass("g = 2..5 on Q^" + std::to_string(M) + " q^" + std::to_string(N) + " |l| <= " + std::to_string(L));
}

Outcome check_gwdt(const RunConfig& c) {
  auto [M, N, L] = fg_window(c);
  CheckReport r = gwdt_identity_check(5, M, N, L, 4);
  if (!r.sufficient) return {kInsufficient, r.detail};
  return r.pass ? pass(std::to_string(r.compared) + " coefficients") : fail(r.detail);
}

Outcome check_schoen(const RunConfig&) {
  SchoenReport r = schoen_f1_check(12);
  if (!r.log_matches_ml) return fail(r.detail);
  if (!r.mixed_vanish) return fail("mixed coefficient nonzero " + r.detail);
  return pass("Q, q <= 12");
}

const std::vector<std::pair<std::string, Outcome (*)(const RunConfig&)>>& checks() {
  static const std::vector<std::pair<std::string, Outcome (*)(const RunConfig&)>> all{
      {"delta", check_delta}, {"theta", check_theta}, {"chi10", check_chi10}, {"dmvv", check_dmvv},
      {"dtbl", check_dtbl},   {"fg", check_fg},       {"gwdt", check_gwdt},   {"schoen", check_schoen},
  };
  return all;
}

int cmd_verify(const RunConfig& c) {
  for (const auto& name : c.only) {
    bool known = false;
    for (const auto& [n, fn] : checks()) known = known || n == name;
    if (!known) throw UsageError("unknown check '" + name + "'");
  }
  int worst = kPass;
  ordered_json report = ordered_json::array();
  for (const auto& [name, fn] : checks()) {
    if (!c.only.empty() && std::find(c.only.begin(), c.only.end(), name) == c.only.end()) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = fn(c);
    } catch (const UnknownCoefficient& e) {
      o = {kInsufficient, e.what()};
    } catch (const WindowOverflow& e) {
      o = {kInsufficient, e.what()};
    } catch (const std::exception& e) {
      o = fail(e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const char* tag = o.status == kPass ? "PASS" : o.status == kFail ? "FAIL" : "INSUFFICIENT";
    if (c.format == "json")
      report.push_back({{"check", name}, {"status", tag}, {"detail", o.detail}});
    else
      std::cout << tag << " " << name << ": " << o.detail << " (" << std::fixed << std::setprecision(1) << secs
                << " s)\n" << std::flush;
    if (o.status == kFail) worst = kFail;
    else if (o.status == kInsufficient && worst == kPass) worst = kInsufficient;
  }
  if (c.format == "json") std::cout << report.dump(1) << "\n";
  return worst;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Banana manifold curve counts: compute, cache, export, verify"};
  app.require_subcommand(1);
  RunConfig c;
  auto windows = [&](CLI::App* s) {
    s->add_option("--NQ", c.NQ, "window in Q (Siegel objects) or total degree (dt)");
    s->add_option("--Nq", c.Nq, "window in q");
    s->add_option("--Ly", c.Ly, "window |l| in y");
    s->add_option("--Kt", c.Kt, "window |k| in t");
    s->add_option("--cache-dir", c.cache_dir, "cache directory (default $BANANA_CACHE_DIR or .banana-cache)");
    s->add_option("--out", c.out, "also write the output file into this directory");
  };
  CLI::App* gv = app.add_subcommand("gv-table", "Gopakumar-Vafa tables n_{g,4n-1}/12 and n_{g,4n}/12");
  windows(gv);
  gv->add_option("--n-max", c.n_max, "rows n = 0..n-max");
  gv->add_option("--g-max", c.g_max, "columns g = 0..g-max");
  gv->add_option("--format", c.format)->check(CLI::IsMember({"text", "csv", "json"}));
  CLI::App* se = app.add_subcommand("series", "export a series");
  windows(se);
  se->add_option("target", c.target)->required()->check(CLI::IsMember({"phi0", "chi10", "chi12", "dt", "f_g", "schoen"}));
  se->add_option("--genus", c.genus, "genus for f_g");
  se->add_option("--format", c.format)->check(CLI::IsMember({"text", "csv", "json"}));
  CLI::App* ve = app.add_subcommand("verify", "run the identity suite");
  windows(ve);
  ve->add_option("--only", c.only, "comma-separated subset of checks")->delimiter(',');
  ve->add_option("--format", c.format)->check(CLI::IsMember({"text", "json"}));
  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }
  try {
    validate(c);
    if (gv->parsed()) return cmd_gv_table(c);
    if (se->parsed()) return cmd_series(c);
    return cmd_verify(c);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const UnknownCoefficient& e) {
    std::cerr << "INSUFFICIENT: " << e.what() << "\n";
    return kInsufficient;
  } catch (const WindowOverflow& e) {
    std::cerr << "INSUFFICIENT: " << e.what() << "\n";
    return kInsufficient;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFail;
  }
}
