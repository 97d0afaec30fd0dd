#include "iwt/cli.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>

#include "json.hpp"

namespace iwt {

using ojson = nlohmann::ordered_json;

// ---------------------------------------------------------------- inputs

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Err::Io, "cannot read " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << text)) fail(Err::Io, "cannot write " + path);
}

GroupPtr parse_group_spec(const std::string& text) {
  try {
    const auto j = nlohmann::json::parse(text);
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "unitriangular") {
      const int N = j.at("N").get<int>(), p = j.at("p").get<int>();
      if (N < 1 || p < 3 || !is_prime(p)) fail(Err::InvalidInput, "unitriangular spec needs N >= 1 and an odd prime p");
      return build_unitriangular(N, p);
    }
    if (kind == "table") {
      const int p = j.at("p").get<int>(), order = j.at("order").get<int>();
      const auto mult = j.at("mult").get<std::vector<std::vector<int>>>();
      if (static_cast<int>(mult.size()) != order) fail(Err::InvalidInput, "table has the wrong number of rows");
      for (const auto& row : mult)
        if (static_cast<int>(row.size()) != order) fail(Err::InvalidInput, "table row has the wrong length");
      return group_from_table(p, mult, true, j.value("name", std::string("table")));
    }
    fail(Err::InvalidInput, "unknown group kind '" + kind + "'");
  } catch (const nlohmann::json::exception& e) {
    fail(Err::InvalidInput, std::string("group spec: ") + e.what());
  }
}

GroupPtr load_group_spec(const std::string& path) { return parse_group_spec(read_file(path)); }

std::optional<Subgroup> default_rw_subgroup(const GroupPtr& G) {
  if (G->is_abelian()) return std::nullopt;
  const Subgroup all = whole(G);
  for (const auto& S : enumerate_subgroups(G)) {
    if (S.order() * G->p != G->order || !S.as_group()->is_abelian() || !is_normal(S, all)) continue;
    return S;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------- suites

namespace {

Series random_series(Rng& r, const Budget& b) {
  std::vector<i64> v(b.n);
  const i64 m = ipow(b.p, b.M);
  for (auto& x : v) x = r.below(m);
  return Series::from_ints(b, v);
}

ConjVec random_cv(Rng& r, const GroupPtr& G, const Budget& b) {
  ConjVec y = ConjVec::zero(G, b);
  for (int c = 0; c < G->num_classes(); ++c)
    y = y + cv_scale(ConjVec::cls(G, b, G->classes()[c][0]), random_series(r, b));
  return y;
}

GR random_gr(Rng& r, const GroupPtr& G, const Budget& b) {
  GR x = GR::zero(G, b);
  for (int g = 0; g < G->order; ++g) x.set(g, random_series(r, b));
  return x;
}

GR random_unit(Rng& r, const GroupPtr& G, const Budget& b, bool principal = false) {
  for (;;) {
    GR x = random_gr(r, G, b);
    const i64 a = aug_residue(x.x);
    if (a == 0) continue;
    if (principal && a != 1) x.add(G->id, Series::constant(b, 1 - a));
    return x;
  }
}

// S-denominator p·r + T + ...
Series random_den(Rng& r, const Budget& b) {
  std::vector<i64> v(b.n, 0);
  v[0] = b.p * (1 + r.below(b.p - 1));
  v[1] = 1;
  if (b.n > 2) v[2] = r.below(b.p);
  return Series::from_ints(b, v);
}

Budget fit(const GroupPtr& G, Budget b) {
  b.p = G->p;
  b.validate();
  return b;
}

Rng rng_for(const SuiteOptions& opt, std::uint64_t salt) { return Rng(opt.seed * 1000003ULL + salt); }

bool has_prefix(const std::vector<std::string>& v, const std::string& pre) {
  for (const auto& s : v)
    if (s.rfind(pre, 0) == 0) return true;
  return false;
}

void merge(CondReport& into, const CondReport& from, const std::string& tag) {
  for (const auto& f : from.failures) into.fail(tag + f);
}

CheckRecord timed(std::string name, std::string anchor, const std::function<void(CondReport&)>& body) {
  CheckRecord c{std::move(name), std::move(anchor), {}, 0};
  const auto t0 = std::chrono::steady_clock::now();
  body(c.rep);
  c.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return c;
}

std::string trial(int t) { return "trial " + std::to_string(t) + ": "; }

}  // namespace

CheckRecord check_theta_A(const GroupPtr& G, const SuiteOptions& opt) {
  return timed("additive theta", "theta_A^+ maps onto Phi and the explicit inverse recovers y", [&](CondReport& r) {
    const Budget b = fit(G, opt.budget);
    const ArtinFamilyC F = build_artin_family_c(G);
    Rng rng = rng_for(opt, 1);
    int ok = 0;
    for (int t = 0; t < opt.trials; ++t) {
      const ConjVec y = random_cv(rng, G, b);
      const AdditiveTuple th = theta_A_plus(y, F);
      const CondReport m = phi_membership(th, F);
      if (!m.ok) {
        merge(r, m, trial(t));
        continue;
      }
      const ConjVec back = theta_A_inverse(th, F);
      if (!(back == y))
        r.fail(trial(t) + "inverse differs from y");
      else if (back.y.k < y.y.k - G->N)
        r.fail(trial(t) + "inverse known to p^" + std::to_string(back.y.k) + " only");
      else
        ++ok;
    }
    // the inverse divides by |G| = p^N once
    r.certificates.push_back(std::to_string(ok) + " round trips exact to p^(M-N) = p^" +
                             std::to_string(b.M - G->N) + " over " + std::to_string(F.entries.size()) + " entries");
  });
}

CheckRecord check_brauer(const GroupPtr& G, const SuiteOptions& opt, int violations) {
  return timed("Brauer reconstruction", "theta_B^+ images satisfy TCC and CCC+ and determine y", [&](CondReport& r) {
    const Budget b = fit(G, opt.budget);
    const ArtinFamilyC F = build_artin_family_c(G);
    const BrauerFamily BF = build_brauer_family(G);
    Rng rng = rng_for(opt, 2);
    int ok = 0;
    for (int t = 0; t < opt.trials; ++t) {
      const ConjVec y = random_cv(rng, G, b);
      const AdditiveTuple th = theta_B_plus(y, BF);
      const CondReport m = phi_B_membership(th, BF);
      if (!m.ok) {
        merge(r, m, trial(t));
        continue;
      }
      const ConjVec back = reconstruct_from_brauer(th, BF, F);
      if (!(back == y))
        r.fail(trial(t) + "reconstruction differs from y");
      else if (back.y.k < y.y.k - G->N)
        r.fail(trial(t) + "reconstruction known to p^" + std::to_string(back.y.k) + " only");
      else
        ++ok;
    }
    r.certificates.push_back(std::to_string(ok) + " Brauer tuples reconstruct exactly to p^" +
                             std::to_string(b.M - G->N));
    // constructed violations: TCC by shifting the top component, CCC+ by a class-unbalanced term
    const Subgroup Z = centre(G);
    int g0 = -1;
    for (int g = 0; g < G->order && g0 < 0; ++g)
      if (!Z.contains(g)) g0 = g;
    int named = 0, made = 0;
    for (int v = 0; v < violations; ++v) {
      AdditiveTuple th = theta_B_plus(random_cv(rng, G, b), BF);
      const bool tcc = v % 2 == 0 || g0 < 0;
      if (tcc) {
        th.comps[BF.top] = th.comps[BF.top] + GR::one(th.comps[BF.top].G, b);
      } else {
        for (size_t i = 0; i < BF.pairs.size(); ++i) {
          const auto& bp = BF.pairs[i];
          if (bp.U.contains(g0)) th.comps[i].add(bp.to_q(g0), Series::constant(b, bp.index));
        }
      }
      ++made;
      const CondReport m = phi_B_membership(th, BF);
      const std::string want = tcc ? "TCC" : "CCC+";
      const std::string other = tcc ? "CCC+" : "TCC";
      if (m.ok || !has_prefix(m.failures, want) || has_prefix(m.failures, other))
        r.fail("violation " + std::to_string(v) + ": " + want + " not isolated");
      else
        ++named;
    }
    if (made > 0) r.certificates.push_back(std::to_string(named) + "/" + std::to_string(made) +
                                           " constructed violations rejected with the right condition");
  });
}

CheckRecord check_descriptors(const GroupPtr& G) {
  return timed("trace images", "Tr(Z_p[Conj G]) = I_U and Tr(Z_p[Conj N(U)]) = I'_U", [&](CondReport& r) {
    const ArtinFamilyC F = build_artin_family_c(G);
    const int p = G->p;
    for (size_t i = 0; i < F.entries.size(); ++i) {
      const auto& E = F.entries[i];
      std::vector<std::vector<i64>> tr;
      for (const auto& cls : G->classes()) tr.push_back(trace_int(G, cls[0], E.U));
      const Descriptor I = image_I(F, static_cast<int>(i));
      const SpanCheck a = compare_span(I, tr, p);
      const Subgroup NU = normalizer(G, E.U);
      const GroupPtr NG = NU.as_group();
      const Subgroup Uin = restrict_to(E.U, NU);
      std::vector<std::vector<i64>> trp;
      for (const auto& cls : NG->classes()) trp.push_back(trace_int(NG, cls[0], Uin));
      const Descriptor Ip = image_I_prime(F, static_cast<int>(i));
      const SpanCheck c = compare_span(Ip, trp, p);
      const std::string tag = "entry " + std::to_string(i) + " (|U| = " + std::to_string(E.U.order()) + "): ";
      if (!a.span_in_D || !a.D_in_span) r.fail(tag + "I_U differs from the trace image: " + a.detail);
      if (!c.span_in_D || !c.D_in_span) r.fail(tag + "I'_U differs from the trace image: " + c.detail);
      if (a.span_in_D && a.D_in_span && c.span_in_D && c.D_in_span)
        r.certificates.push_back(tag + describe(I) + " ; " + describe(Ip));
    }
  });
}

CheckRecord check_char_p(const GroupPtr& G, const SuiteOptions& opt) {
  return timed("char p power identity", "x^#D = aug(x)^#D modulo p over the abelianization", [&](CondReport& r) {
    const Budget b = fit(G, opt.budget);
    const Quotient ab = quotient(G, commutator_subgroup(G));
    Rng rng = rng_for(opt, 4);
    int ok = 0;
    for (int t = 0; t < opt.trials; ++t) {
      if (char_p_power_identity(random_gr(rng, ab.group, b)))
        ++ok;
      else
        r.fail(trial(t) + "identity fails");
    }
    r.certificates.push_back(std::to_string(ok) + " samples over |G^ab| = " + std::to_string(ab.group->order));
  });
}

CheckRecord check_congruences(const GroupPtr& G, const SuiteOptions& opt) {
  return timed("norm congruences", "theta(x) in 1 + J and the I-congruence by both routes", [&](CondReport& r) {
    const Budget b = fit(G, opt.budget);
    const ArtinFamilyC F = build_artin_family_c(G);
    const BrauerFamily BF = build_brauer_family(G);
    Rng rng = rng_for(opt, 5);
    int ok = 0;
    for (int t = 0; t < opt.trials; ++t) {
      const GR x = random_unit(rng, G, b);
      CondReport one;
      for (const auto& bp : BF.pairs)
        if (bp.index > 1) merge(one, congruence_check_J(x, bp), "");
      for (size_t idx = 0; idx < F.entries.size(); ++idx)
        if (F.entries[idx].U.order() < G->order) merge(one, congruence_check_I(x, F, static_cast<int>(idx)), "");
      const PsiReport pr = psi_membership(theta_tuple(x, BF), BF, F);
      if (pr.verdict != PsiVerdict::InPsi) one.fail(std::string("theta(x) verdict ") + psi_name(pr.verdict));
      merge(r, one, trial(t));
      ok += one.ok;
    }
    r.certificates.push_back(std::to_string(ok) + " units: J on every proper pair, I on every proper U in F_A^c, "
                             "log and norm routes agree");
  });
}

CheckRecord check_log_norm(const GroupPtr& G, const SuiteOptions& opt) {
  return timed("log and norm", "Tr(log x) = log(Nr x) for principal units", [&](CondReport& r) {
    const Budget b = fit(G, opt.budget);
    const ArtinFamily F = build_artin_family(G);
    Rng rng = rng_for(opt, 6);
    int ok = 0, pairs = 0;
    for (size_t i = 0; i < F.entries.size(); ++i) {
      const Subgroup& U = F.entries[i].U;
      if (U.order() == 1) continue;
      ++pairs;
      for (int t = 0; t < opt.trials; ++t) {
        if (compat_log_norm(random_unit(rng, G, b, true), U))
          ++ok;
        else
          r.fail("U_h with h = " + std::to_string(F.entries[i].h) + ", " + trial(t) + "Tr(log x) != log Nr(x)");
      }
    }
    r.certificates.push_back(std::to_string(ok) + " samples over " + std::to_string(pairs) + " subgroups");
  });
}

CheckRecord check_integral_log(const GroupPtr& G, const SuiteOptions& opt) {
  return timed("integral logarithm", "Gamma_G kills torsion, omega(Gamma_G(x)) = 1, abelian inverter", [&](CondReport& r) {
    const Budget b = fit(G, opt.budget);
    const Quotient ab = quotient(G, commutator_subgroup(G));
    for (int g = 0; g < G->order; ++g) {
      if (!integral_log(GR::elem(G, b, g)).value.y.is_zero()) r.fail("Gamma_G(g) != 0 for g = " + std::to_string(g));
      if (!integral_log(gr_scale(GR::elem(G, b, g), Series::constant(b, -1))).value.y.is_zero())
        r.fail("Gamma_G(-g) != 0 for g = " + std::to_string(g));
    }
    r.certificates.push_back("Gamma_G(+-g) = 0 for all " + std::to_string(G->order) + " elements");
    Rng rng = rng_for(opt, 7);
    int om = 0;
    for (int t = 0; t < opt.trials; ++t) {
      const ConjVec y = integral_log(random_unit(rng, G, b)).value;
      bool good = true;
      for (int j = 1; j <= 3; ++j) {
        const OmegaValue w = omega_at_level(y, j, ab);
        if (w.gab != ab.group->id || w.gamma_exp != 0) good = false;
      }
      if (!good) r.fail(trial(t) + "omega(Gamma_G(x)) nontrivial");
      om += good;
    }
    r.certificates.push_back(std::to_string(om) + " units with omega trivial at levels 1..3");
    int inv = 0;
    for (int t = 0; t < opt.trials; ++t) {
      Series u = random_series(rng, b);
      if (pmod(u.coeff_int(0), b.p) == 0) u = u + Series::one(b);
      const Series y = integral_log_gamma(u);
      if (integral_log_gamma(intlog_invert_abelian(y)) == y)
        ++inv;
      else
        r.fail(trial(t) + "Gamma_Gamma(invert(y)) != y");
    }
    r.certificates.push_back(std::to_string(inv) + " inverter round trips");
  });
}

CheckRecord check_localized(const GroupPtr& G, const SuiteOptions& opt, int localized) {
  return timed("localized intersection", "integral tuples get the same verdict in Psi and Psi_S", [&](CondReport& r) {
    const Budget b = fit(G, opt.budget);
    const ArtinFamilyC F = build_artin_family_c(G);
    const BrauerFamily BF = build_brauer_family(G);
    Rng rng = rng_for(opt, 8);
    int victim = -1;
    for (const auto& cv : BF.covers)
      if (cv.small != BF.top) victim = cv.small;
    int same = 0, outs = 0;
    for (int t = 0; t < opt.trials; ++t) {
      const GR x = random_unit(rng, G, b);
      const Series d = random_den(rng, b);
      ThetaTuple ti = theta_tuple(x, BF);
      ThetaTuple ts = theta_tuple_S(make_localized(gr_scale(x, d), d), BF);
      if (t % 2 == 1 && victim >= 0) {
        const Series bump = Series::from_ints(b, {1, 1});
        ti.comps[victim] = gr_scale(ti.comps[victim], bump);
        ts.comps[victim] = gr_scale(ts.comps[victim], bump);
      }
      const PsiReport a = psi_membership(ti, BF, F), s = psi_membership(ts, BF, F);
      outs += a.verdict == PsiVerdict::Out;
      if (a.verdict != s.verdict || a.passes_c != s.passes_c)
        r.fail(trial(t) + "integral verdict " + psi_name(a.verdict) + ", localized " + psi_name(s.verdict));
      else
        ++same;
    }
    r.certificates.push_back(std::to_string(same) + " integral tuples (" + std::to_string(outs) +
                             " outside Psi) with matching verdicts");
    int in = 0, undecided = 0;
    for (int t = 0; t < localized; ++t) {
      const LocalizedGR x = make_localized(random_unit(rng, G, b), random_den(rng, b));
      const ThetaTuple ts = theta_tuple_S(x, BF);
      const PsiReport pr = psi_membership(ts, BF, F);
      if (pr.verdict != PsiVerdict::InPsi) r.fail("localized " + trial(t) + "verdict " + psi_name(pr.verdict));
      bool fp = false;
      for (size_t i = 0; i < ts.comps.size(); ++i) {
        try {
          if (localized_integral(ts.comps[i], ts.den(i), nullptr)) fp = true;
        } catch (const Error& e) {
          if (e.code() != Err::PrecisionExhausted) throw;
          ++undecided;
        }
      }
      if (fp) r.fail("localized " + trial(t) + "component reported integral");
      in += pr.verdict == PsiVerdict::InPsi && !fp;
    }
    if (localized > 0)
      r.certificates.push_back(std::to_string(in) + " localized units in Psi_S with no integrality false positive (" +
                               std::to_string(undecided) + " components undecided at this precision)");
  });
}

CheckRecord check_orbital(const GroupPtr& G, int level) {
  return timed("orbital sums", "P_y = Tr(y) lies in I'_U and p | aug(P_y)", [&](CondReport& r) {
    const ArtinFamilyC F = build_artin_family_c(G);
    const BrauerFamily BF = build_brauer_family(G);
    int pairs = 0, entries = 0;
    for (size_t i = 0; i < BF.pairs.size(); ++i) {
      if (BF.pairs[i].index == 1) continue;
      const CondReport c = orbital_p_check(BF, F, static_cast<int>(i), level);
      merge(r, c, "");
      ++pairs;
    }
    for (const auto& E : F.entries)
      if (E.U.order() < G->order && BF.find(E.U) >= 0) ++entries;
    r.certificates.push_back(std::to_string(pairs) + " proper pairs at level " + std::to_string(level) + ", " +
                             std::to_string(entries) + " of them from F_A^c");
  });
}

CheckRecord check_rw(const GroupPtr& G, const Subgroup& W, const SuiteOptions& opt) {
  return timed("Ritter-Weiss variant", "Steps 1-5 for the family {(G,[G,G]), (W,{e})}", [&](CondReport& r) {
    RWOptions o;
    o.budget = fit(G, opt.budget);
    o.trials = opt.trials;
    o.seed = opt.seed * 1000003ULL + 9;
    r = rw_verify(G, W, o);
  });
}

CheckRecord check_pipeline(const GroupPtr& G, const SuiteOptions& opt) {
  return timed("Burns pipeline", "xi/f in Psi, strong congruences on w, torsion refinement recovers xi", [&](CondReport& r) {
    const Budget b = fit(G, opt.budget);
    const ArtinFamilyC F = build_artin_family_c(G);
    const BrauerFamily BF = build_brauer_family(G);
    Rng rng = rng_for(opt, 10);
    int ok = 0;
    for (int t = 0; t < opt.trials; ++t) {
      CondReport one;
      const Series d = random_den(rng, b);
      const GR n = random_unit(rng, G, b), u = random_unit(rng, G, b);
      const ThetaTuple f = theta_tuple_S(make_localized(n, d), BF);
      const LocalizedGR xu = make_localized(n * u, d);
      const ThetaTuple xi = theta_tuple_S(xu, BF);
      const PatchCertificate c = burns_patch(f, xi, BF, F);
      const ThetaTuple tu = theta_tuple(u, BF);
      for (size_t i = 0; i < BF.pairs.size(); ++i)
        if (!(c.w.comps[i] == tu.comps[i])) one.fail("w differs from theta(u) at pair " + std::to_string(i));
      merge(one, strong_congruence_check(c.w, BF, F), "");
      const int g = static_cast<int>(rng.below(G->order));
      const ThetaTuple twisted = theta_tuple_S(make_localized(GR::elem(G, b, g) * xu.num, d), BF);
      const RefinementResult ref = torsion_refinement(twisted, BF, synthetic_provider(xu));
      merge(one, ref.rep, "refinement: ");
      for (size_t i = 0; i < BF.pairs.size(); ++i)
        if (!(ref.xi.comps[i] == xi.comps[i]) || !(ref.xi.den(i) == xi.den(i)))
          one.fail("refined tuple differs from xi at pair " + std::to_string(i));
      merge(r, one, trial(t));
      ok += one.ok;
    }
    r.certificates.push_back(std::to_string(ok) + " fixtures: w = theta(u), strong congruences hold, "
                             "torsion refinement returns xi exactly");
  });
}

std::vector<CheckRecord> run_suite(const std::string& suite, const GroupPtr& G, const SuiteOptions& opt,
                                   std::vector<std::string>& warnings) {
  static const std::vector<std::string> known{"additive", "log", "congruence", "localized", "rw", "all"};
  if (std::find(known.begin(), known.end(), suite) == known.end())
    fail(Err::InvalidInput, "unknown suite '" + suite + "'");
  if (opt.trials < 0) fail(Err::InvalidInput, "trials must be >= 0");
  if (opt.trials == 0) warnings.push_back("trials = 0: randomized checks ran no samples");
  const bool all = suite == "all";
  std::vector<CheckRecord> out;
  if (all || suite == "additive") {
    out.push_back(check_theta_A(G, opt));
    out.push_back(check_brauer(G, opt, opt.trials == 0 ? 0 : 20));
    out.push_back(check_descriptors(G));
  }
  if (all || suite == "log") {
    out.push_back(check_char_p(G, opt));
    out.push_back(check_integral_log(G, opt));
    out.push_back(check_log_norm(G, opt));
  }
  if (all || suite == "congruence") out.push_back(check_congruences(G, opt));
  if (all || suite == "localized") out.push_back(check_localized(G, opt, opt.trials == 0 ? 0 : 20));
  if (all || suite == "rw") {
    auto W = default_rw_subgroup(G);
    if (W)
      out.push_back(check_rw(G, *W, opt));
    else
      warnings.push_back("no abelian normal subgroup of index p: Ritter-Weiss checks skipped");
  }
  if (all) {
    out.push_back(check_orbital(G, opt.level));
    out.push_back(check_pipeline(G, opt));
  }
  return out;
}

// ---------------------------------------------------------------- reports

namespace {

constexpr const char* kVersion = "0.1.0";

std::string digest(const std::vector<std::string>& lines) {
  std::uint64_t h = 1469598103934665603ULL;
  for (const auto& s : lines) {
    for (unsigned char ch : s) {
      h ^= ch;
      h *= 1099511628211ULL;
    }
    h ^= 0x0a;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

ojson budget_json(const Budget& b) { return ojson{{"p", b.p}, {"M", b.M}, {"n", b.n}, {"B", b.B}}; }

GroupPtr group_of(const RunConfig& cfg) {
  if (!cfg.group_path.empty() && cfg.unitriangular > 0)
    fail(Err::InvalidInput, "give either --group or --unitriangular");
  GroupPtr G;
  if (!cfg.group_path.empty()) {
    G = load_group_spec(cfg.group_path);
    if (cfg.p && *cfg.p != G->p) fail(Err::BudgetMismatch, "--p differs from the prime of the group file");
  } else if (cfg.unitriangular > 0) {
    const int p = cfg.p.value_or(3);
    if (p < 3 || !is_prime(p)) fail(Err::InvalidInput, "--p must be an odd prime");
    G = build_unitriangular(cfg.unitriangular, p);
  } else {
    fail(Err::InvalidInput, "no group: pass --group PATH or --unitriangular N");
  }
  return G;
}

Budget budget_of(const RunConfig& cfg, const GroupPtr& G) {
  Budget b = cfg.budget;
  b.p = G->p;
  b.validate();
  return b;
}

ojson config_json(const RunConfig& cfg, const std::string& command) {
  ojson c;
  c["command"] = command;
  if (!cfg.group_path.empty())
    c["group"] = cfg.group_path;
  else
    c["group"] = "unitriangular N=" + std::to_string(cfg.unitriangular) + " p=" + std::to_string(cfg.p.value_or(3));
  c["budget"] = budget_json(cfg.budget);
  c["seed"] = cfg.seed;
  c["trials"] = cfg.trials;
  c["level"] = cfg.level;
  return c;
}

ojson check_json(const CheckRecord& c, bool timings) {
  ojson j;
  j["name"] = c.name;
  j["anchor"] = c.anchor;
  j["verdict"] = c.rep.ok ? "pass" : "fail";
  j["certificates"] = c.rep.certificates;
  j["failures"] = c.rep.failures;
  j["digest"] = digest(c.rep.certificates);
  if (timings) j["seconds"] = c.seconds;
  return j;
}

struct Builder {
  ojson j;
  std::vector<std::string> warnings;
  bool timings = false;
  Builder(const RunConfig& cfg, const std::string& command) : timings(cfg.timings) {
    j["tool"] = "iwt";
    j["version"] = kVersion;
    j["config"] = config_json(cfg, command);
    j["checks"] = ojson::array();
  }
  void add(const CheckRecord& c) { j["checks"].push_back(check_json(c, timings)); }
  Report done() {
    bool ok = true;
    for (const auto& c : j["checks"]) ok = ok && c["verdict"] == "pass";
    j["warnings"] = warnings;
    j["verdict"] = ok ? "pass" : "fail";
    const int code = ok ? 0 : 2;
    j["exit_code"] = code;
    return {j.dump(2) + "\n", code, warnings};
  }
  Report error(const Error& e) {
    j["warnings"] = warnings;
    j["verdict"] = "error";
    j["error"] = {{"code", err_name(e.code())}, {"message", e.what()}};
    const int code = exit_code_for(e.code());
    j["exit_code"] = code;
    return {j.dump(2) + "\n", code, warnings};
  }
};

template <class F>
Report guarded(const RunConfig& cfg, const std::string& command, F&& body) {
  Builder rb(cfg, command);
  try {
    body(rb);
    return rb.done();
  } catch (const Error& e) {
    return rb.error(e);
  }
}

ojson subgroup_json(const Subgroup& S) { return S.elems; }

}  // namespace

Report cmd_group_info(const RunConfig& cfg) {
  return guarded(cfg, "group-info", [&](Builder& rb) {
    const GroupPtr G = group_of(cfg);
    ojson g;
    g["name"] = G->name;
    g["p"] = G->p;
    g["order"] = G->order;
    g["N"] = G->N;
    g["abelian"] = G->is_abelian();
    std::vector<int> sizes;
    for (const auto& c : G->classes()) sizes.push_back(static_cast<int>(c.size()));
    g["classes"] = G->num_classes();
    g["class_sizes"] = sizes;
    g["centre"] = subgroup_json(centre(G));
    g["commutator"] = subgroup_json(commutator_subgroup(G));
    const ArtinFamily A = build_artin_family(G);
    ojson ent = ojson::array();
    for (const auto& e : A.entries) ent.push_back({{"h", e.h}, {"U_order", e.U.order()}, {"n_h", e.n}});
    g["artin_family"] = ent;
    if (!G->is_abelian()) {
      const ArtinFamilyC F = build_artin_family_c(G);
      g["c"] = F.c;
      ojson fc = ojson::array();
      for (const auto& e : F.entries) {
        const char* kind = e.kind == AKind::Gamma ? "Gamma" : (e.kind == AKind::Cyclic ? "U_h" : "U_hc");
        ojson x{{"kind", kind}, {"h", e.h}, {"U_order", e.U.order()}, {"n_h", e.n_h}};
        if (e.kind == AKind::WithC) x["case"] = e.tag == CaseTag::A ? "A" : "B";
        fc.push_back(x);
      }
      g["artin_family_c"] = fc;
    }
    const BrauerFamily BF = build_brauer_family(G);
    ojson bf = ojson::array();
    for (const auto& bp : BF.pairs) bf.push_back({{"U_order", bp.U.order()}, {"V_order", bp.V.order()}, {"index", bp.index}});
    g["brauer_family"] = bf;
    auto W = default_rw_subgroup(G);
    if (W) g["rw_subgroup"] = subgroup_json(*W);
    g["sk1_known_trivial"] = sk1_known_trivial(G);
    rb.j["group"] = g;
  });
}

Report cmd_verify(const RunConfig& cfg) {
  return guarded(cfg, "verify", [&](Builder& rb) {
    rb.j["config"]["suite"] = cfg.suite;
    const GroupPtr G = group_of(cfg);
    SuiteOptions opt;
    opt.budget = budget_of(cfg, G);
    opt.trials = cfg.trials;
    opt.seed = cfg.seed;
    opt.level = cfg.level;
    for (const auto& c : run_suite(cfg.suite, G, opt, rb.warnings)) rb.add(c);
  });
}

Report cmd_patch(const RunConfig& cfg) {
  return guarded(cfg, "patch", [&](Builder& rb) {
    if (cfg.f_path.empty() || cfg.xi_path.empty()) fail(Err::InvalidInput, "patch needs --f and --xi");
    const GroupPtr G = group_of(cfg);
    require_sk1_trivial(G);
    const BrauerFamily BF = build_brauer_family(G);
    const ArtinFamilyC F = build_artin_family_c(G);
    const ThetaTuple f = read_tuple(read_file(cfg.f_path), BF);
    const ThetaTuple xi = read_tuple(read_file(cfg.xi_path), BF);
    if (!(f.comps[0].budget() == xi.comps[0].budget())) fail(Err::BudgetMismatch, "f and xi carry different budgets");
    rb.j["config"]["budget"] = budget_json(f.comps[0].budget());
    PatchCertificate c;
    CheckRecord patch = timed("patching", "w = xi/f is an integral unit tuple in Psi", [&](CondReport& r) {
      c = burns_patch(f, xi, BF, F);
      r.certificates = c.integrality;
      for (const auto& s : c.psi.rep.certificates) r.certificates.push_back(s);
      r.certificates.push_back(std::string("Psi verdict ") + psi_name(c.psi.verdict));
      r.certificates.push_back("Gamma_G(w) known to p^" + std::to_string(c.y_precision));
    });
    rb.add(patch);
    rb.add(timed("strong congruences", "w satisfies the strong J- and I-congruences", [&](CondReport& r) {
      r = strong_congruence_check(c.w, BF, F);
    }));
    if (!cfg.oracle_path.empty()) {
      const ZetaOracle O = read_oracle(read_file(cfg.oracle_path));
      rb.add(timed("orbital sums", "zeta data satisfy the orbital-sum condition", [&](CondReport& r) {
        r = orbital_sum_check(O, BF, F);
      }));
    }
    if (!cfg.out_path.empty()) {
      write_file(cfg.out_path, write_tuple(c.xi_out, BF));
      rb.j["output"] = cfg.out_path;
    }
  });
}

Report cmd_orbital(const RunConfig& cfg) {
  return guarded(cfg, "orbital", [&](Builder& rb) {
    const GroupPtr G = group_of(cfg);
    const BrauerFamily BF = build_brauer_family(G);
    const ArtinFamilyC F = build_artin_family_c(G);
    if (cfg.oracle_path.empty()) {
      rb.add(check_orbital(G, cfg.level));
      return;
    }
    const ZetaOracle O = read_oracle(read_file(cfg.oracle_path));
    if (O.pair < 0 || O.pair >= static_cast<int>(BF.pairs.size())) fail(Err::InvalidInput, "oracle pair out of range");
    rb.add(timed("orbital sums", "Delta divisible by isotropy orders, (1-w)xi in Lambda(Gamma) + J (+ I'_U)",
                 [&](CondReport& r) { r = orbital_sum_check(O, BF, F); }));
  });
}

Report cmd_fixture(const RunConfig& cfg) {
  return guarded(cfg, "fixture", [&](Builder& rb) {
    if (cfg.out_dir.empty()) fail(Err::InvalidInput, "fixture needs --out-dir");
    const GroupPtr G = group_of(cfg);
    const Budget b = budget_of(cfg, G);
    const BrauerFamily BF = build_brauer_family(G);
    Rng rng(cfg.seed);
    const Series d = random_den(rng, b);
    const GR n = random_unit(rng, G, b), u = random_unit(rng, G, b);
    write_file(cfg.out_dir + "/f.json", write_tuple(theta_tuple_S(make_localized(n, d), BF), BF));
    write_file(cfg.out_dir + "/xi.json", write_tuple(theta_tuple_S(make_localized(n * u, d), BF), BF));
    // oracle on the first proper pair with V trivial; coefficients constant on N(U)-orbits
    // and divisible by the isotropy orders
    int pi = -1;
    for (size_t i = 0; i < BF.pairs.size() && pi < 0; ++i)
      if (BF.pairs[i].index > 1 && BF.pairs[i].V.order() == 1 && BF.pairs[i].U.order() > 1) pi = static_cast<int>(i);
    if (pi >= 0) {
      const BrauerPair& bp = BF.pairs[pi];
      const Subgroup NU = normalizer(G, bp.U);
      GR num = GR::scalar(bp.Q.group, random_series(rng, b));
      std::vector<char> seen(bp.qorder(), 0);
      for (int q = 0; q < bp.qorder(); ++q) {
        if (seen[q] || q == bp.Q.group->id) continue;
        std::vector<int> orbit;
        int fix = 0;
        for (int a : NU.elems) {
          const int y = bp.to_q(G->conj(bp.from_q(q), a));
          fix += y == q;
          if (!seen[y]) orbit.push_back(y);
          seen[y] = 1;
        }
        const Series s(scale_int(random_series(rng, b), fix / bp.U.order()));
        for (int y : orbit) num.set(y, s);
      }
      const ZetaOracle O = synthetic_oracle(num, Series::one(b), false, pi, 1, 1 + b.p, {1, 2}, {b.p - 1});
      write_file(cfg.out_dir + "/oracle.txt", write_oracle(O));
    } else {
      rb.warnings.push_back("no proper pair with trivial V: oracle not written");
    }
    rb.j["output"] = cfg.out_dir;
  });
}

}  // namespace iwt
