#include "rflab/ancient.hpp"
#include "rflab/catalog.hpp"
#include "rflab/numdiff.hpp"
#include "rflab/trajectory_io.hpp"

#include <CLI11.hpp>

#include <clocale>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace fs = std::filesystem;
using nlohmann::json;

namespace
{

  rflab::CatalogEntry resolve_entry(const std::string& spec)
  {
    if (fs::exists(spec) && fs::is_regular_file(spec)) {
      std::ifstream is(spec);
      json j;
      is >> j;
      rflab::CatalogEntry e;
      e.id = fs::path(spec).stem().string();
      e.description = "user space from " + spec;
      e.representation = "structure_constants";
      e.space = std::make_shared<rflab::HomogeneousSpace>(rflab::space_from_json(j, e.id));
      return e;
    }
    return rflab::catalog_entry(spec);
  }

  rflab::Vec parse_coeffs(const std::string& s)
  {
    std::vector<double> vals;
    std::stringstream ss(s);
    std::string cell;
    while (std::getline(ss, cell, ','))
      vals.push_back(std::stod(cell));
    rflab::Vec v(vals.size());
    for (size_t i = 0; i < vals.size(); ++i)
      v(static_cast<int>(i)) = vals[i];
    return v;
  }

  rflab::Mat module_diagonal_metric(const rflab::HomogeneousSpace& space, const rflab::Vec& x)
  {
    const rflab::Frame& F = space.frame();
    if (x.size() != F.n_modules())
      throw rflab::input_error("expected one coefficient per module (" +
                               std::to_string(F.n_modules()) + ")");
    rflab::Mat P = rflab::Mat::Zero(F.m(), F.m());
    for (int i = 0; i < F.n_modules(); ++i)
      P.block(F.module_offset[i], F.module_offset[i], F.module_dim[i], F.module_dim[i]) =
        x(i) * rflab::Mat::Identity(F.module_dim[i], F.module_dim[i]);
    return P;
  }

  rflab::Mat metric_from_coeffs(const rflab::HomogeneousSpace& space,
                                const rflab::InvariantBasis& basis, const rflab::Vec& c)
  {
    if (c.size() == space.frame().n_modules())
      return module_diagonal_metric(space, c);
    if (c.size() == basis.dim())
      return basis.unpack(c);
    throw rflab::input_error("coefficient vector length matches neither the module count nor the basis dimension");
  }

  json spectrum_json(const rflab::SpectrumInfo& s)
  {
    json j;
    j["spectrum"] = std::vector<double>(s.spectrum.data(), s.spectrum.data() + s.spectrum.size());
    j["scaling_eigenvalue"] = s.scaling_eigenvalue;
    j["coindex"] = s.coindex;
    j["nullity"] = s.nullity;
    j["negative_count"] = s.negative;
    return j;
  }

  json einstein_json(const rflab::EinsteinPoint& pt)
  {
    json j;
    j["coordinates"] = std::vector<double>(pt.coordinates.data(),
                                           pt.coordinates.data() + pt.coordinates.size());
    j["coordinate_type"] = pt.lambda_coords ? "module_scalings" : "basis_coefficients";
    j["lambda"] = pt.lambda;
    j["residual"] = pt.residual;
    j["backend"] = pt.backend;
    j.update(spectrum_json(pt.spectrum));
    return j;
  }

  // Resolves --base-einstein (tag or per-module coefficients) to a polished
  // Einstein point on the base of the fibration.
  rflab::EinsteinPoint resolve_base_einstein(const rflab::CatalogEntry& entry,
                                             const rflab::HomogeneousSpace& base,
                                             const rflab::InvariantBasis& base_basis,
                                             const std::string& what)
  {
    rflab::Vec seed;
    bool parsed = false;
    try {
      seed = parse_coeffs(what);
      parsed = seed.size() > 0;
    } catch (...) {
      parsed = false;
    }
    if (!parsed) {
      // tag lookup: first on the entry itself, then on the base's catalog twin
      const rflab::CatalogEntry::KnownEinstein* known = nullptr;
      for (const auto& k : entry.known_einstein)
        if (k.tag == what) known = &k;
      if (!known) {
        for (const auto& id : rflab::catalog_ids()) {
          try {
            rflab::CatalogEntry cand = rflab::catalog_entry(id);
            if (!cand.space || cand.space->has_toral_split()) continue;
            if (cand.space->dim_m() != base.dim_m()) continue;
            for (const auto& k : cand.known_einstein)
              if (k.tag == what && k.coefficients.size() == base.frame().n_modules())
                known = &k;
            if (known) {
              seed = known->coefficients;
              break;
            }
          } catch (...) {
          }
        }
        if (!known)
          throw rflab::input_error("no Einstein point tagged '" + what + "' for this fibration");
      } else {
        seed = known->coefficients;
      }
    }
    rflab::Mat P = module_diagonal_metric(base, seed);
    return rflab::find_einstein(base, base_basis, P);
  }

  json candidate_json(const rflab::AncientCandidate& c, const rflab::CollapsedFixedPoint& fp,
                      int index, const std::string& bpath, const std::string& fpath)
  {
    json j;
    j["index"] = index;
    j["direction"] = std::vector<double>(c.direction.data(),
                                         c.direction.data() + c.direction.size());
    j["eps"] = c.eps;
    j["accepted"] = c.accepted;
    j["degenerate_vertical"] = c.degenerate_vertical;
    if (!c.rejection.empty())
      j["rejection"] = c.rejection;
    json cert;
    cert["min_distance"] = c.min_distance;
    cert["backward_decay_rate"] = c.backward_decay_rate;
    cert["matched_eigenvalue"] = c.matched_eigenvalue;
    cert["rate_mismatch"] = c.rate_mismatch;
    cert["scal_limit_error"] = c.scal_limit_error;
    cert["fiber_diameter_final"] = c.fiber_diameter_final;
    cert["pn_deviation_final"] = c.pn_deviation_final;
    cert["log_sigma_slope"] = c.log_sigma_slope;
    cert["s_range_min"] = c.s_range_min;
    cert["positivity_time_forward"] = c.positivity_time;
    j["certificates"] = cert;
    rflab::CollapseReport rep = rflab::verify_collapse(c, fp);
    json items = json::array();
    for (const auto& it : rep.items) {
      json ij;
      ij["name"] = it.name;
      ij["value"] = it.value;
      ij["threshold"] = it.threshold;
      ij["passed"] = it.passed;
      items.push_back(ij);
    }
    j["collapse_certificates"] = items;
    j["collapsing_ancient"] = rep.collapsing_ancient;
    if (!bpath.empty()) j["backward_csv"] = bpath;
    if (!fpath.empty()) j["forward_csv"] = fpath;
    return j;
  }

} // namespace

int main(int argc, char** argv)
{
  std::setlocale(LC_NUMERIC, "C");
#ifdef _OPENMP
  if (const char* env = std::getenv("RFLAB_THREADS")) {
    int n = std::atoi(env);
    if (n > 0) omp_set_num_threads(n);
  }
#endif

  CLI::App app{"rflab - curvature, Ricci flow and collapsed ancient solutions on homogeneous spaces"};
  app.require_subcommand(1);
  app.set_version_flag("--version", rflab::kVersion);

  std::string space_id, at_coeffs, from_coeffs, base_arg, out_path, traj_dir, kind = "rf";
  std::string columns = "t,scal";
  std::string dir_coeffs;
  int seeds = 12, scan_n = 0, every = 1, max_points = 500;
  double t0 = 0.0, t1 = 1.0, eps = 1e-6;
  double rel_tol = 1e-10, abs_tol = 1e-10, max_step = 0.1;

  auto* c_validate = app.add_subcommand("validate", "run all invariance checks on a space");
  c_validate->add_option("space", space_id, "catalog id or space json path")->required();

  auto* c_einstein = app.add_subcommand("einstein", "multi-seed Einstein metric search");
  c_einstein->add_option("space", space_id)->required();
  c_einstein->add_option("--seeds", seeds, "number of search seeds");
  c_einstein->add_option("--out", out_path, "write the JSON report here");

  auto* c_coindex = app.add_subcommand("coindex", "Hessian spectrum and coindex at a point");
  c_coindex->add_option("space", space_id)->required();
  c_coindex->add_option("--at", at_coeffs, "per-module coefficients")->required();

  auto* c_flow = app.add_subcommand("flow", "integrate a curvature flow, write CSV + manifest");
  c_flow->add_option("space", space_id)->required();
  c_flow->add_option("--kind", kind, "rf | nrf | prf")->check(CLI::IsMember({"rf", "nrf", "prf"}));
  c_flow->add_option("--from", from_coeffs, "initial metric coefficients")->required();
  c_flow->add_option("--base", base_arg, "base Einstein metric for prf (tag or coefficients)");
  c_flow->add_option("--t0", t0);
  c_flow->add_option("--t1", t1);
  c_flow->add_option("--out", out_path, "output CSV path");
  c_flow->add_option("--rel-tol", rel_tol);
  c_flow->add_option("--abs-tol", abs_tol);
  c_flow->add_option("--max-step", max_step);

  auto* c_ancient = app.add_subcommand("ancient", "collapsed fixed point analysis and shooting");
  c_ancient->add_option("fibration", space_id)->required();
  c_ancient->add_option("--base-einstein", base_arg, "tag (ke, normal) or coefficients")->required();
  c_ancient->add_option("--scan", scan_n, "shoot a family scan with this many directions");
  c_ancient->add_option("--dir", dir_coeffs, "single shot along these unstable coefficients");
  c_ancient->add_option("--eps", eps, "perturbation size");
  c_ancient->add_option("--out", out_path, "JSONL candidate catalog path");
  c_ancient->add_option("--traj-dir", traj_dir, "directory for trajectory CSVs");

  auto* c_plot = app.add_subcommand("plotdata", "downsample trajectory columns for plotting");
  c_plot->add_option("csv", space_id, "trajectory csv")->required();
  c_plot->add_option("--columns", columns, "comma separated column names");
  c_plot->add_option("--every", every, "keep every k-th row");
  c_plot->add_option("--max-points", max_points, "cap the number of rows");
  c_plot->add_option("--out", out_path, "output path (default stdout)");

  auto* c_catalog = app.add_subcommand("catalog", "list catalog spaces");

  CLI11_PARSE(app, argc, argv);

  try {
    if (c_catalog->parsed()) {
      for (const auto& id : rflab::catalog_ids()) {
        rflab::CatalogEntry e = rflab::catalog_entry(id);
        std::cout << id << "  [" << e.representation << "]  " << e.description << "\n";
      }
      return 0;
    }

    if (c_validate->parsed()) {
      rflab::CatalogEntry e = resolve_entry(space_id);
      if (!e.space) {
        std::cout << "diagonal scalar model entry: no algebraic invariants to check\n";
        return 0;
      }
      rflab::ValidationReport rep = e.space->validate();
      for (const auto& c : rep.checks)
        std::cout << (c.passed() ? "PASS" : "FAIL") << "  " << c.name
                  << "  residual=" << rflab::format_g17(c.residual)
                  << "  tol=" << rflab::format_g17(c.tolerance) << "\n";
      std::cout << (rep.passed() ? "OK" : "INVALID") << "\n";
      return rep.passed() ? 0 : 1;
    }

    if (c_einstein->parsed()) {
      rflab::CatalogEntry e = resolve_entry(space_id);
      json out = json::array();
      if (e.space) {
        rflab::InvariantBasis basis = rflab::invariant_sym_basis(*e.space);
        auto pts = rflab::find_einstein_multiseed(*e.space, basis, seeds, {},
                                                  e.symmetry_permutations);
        for (const auto& p : pts)
          out.push_back(einstein_json(p));
      } else {
        auto pts = rflab::find_einstein_multiseed(*e.model, seeds, {}, e.symmetry_permutations);
        for (const auto& p : pts)
          out.push_back(einstein_json(p));
      }
      std::string dump = out.dump(2);
      if (!out_path.empty()) {
        std::ofstream os(out_path, std::ios::binary);
        os << dump << '\n';
      }
      std::cout << dump << "\n";
      return 0;
    }

    if (c_coindex->parsed()) {
      rflab::CatalogEntry e = resolve_entry(space_id);
      rflab::Vec x = parse_coeffs(at_coeffs);
      json j;
      if (e.space) {
        rflab::InvariantBasis basis = rflab::invariant_sym_basis(*e.space);
        rflab::Mat P = metric_from_coeffs(*e.space, basis, x);
        double det = P.determinant();
        P /= std::pow(det, 1.0 / e.space->dim_m());
        rflab::Mat ric0 = rflab::traceless_ricci(*e.space, P);
        j["residual"] = ric0.norm();
        j["backend"] = "structure_constants";
        j.update(spectrum_json(rflab::hessian_spectrum_coindex(*e.space, basis, P)));
      } else {
        rflab::Vec lam = e.model->normalize_volume(x);
        rflab::ScalarFn f = [&](const rflab::Vec& v) { return e.model->tscal(v); };
        rflab::Vec g = rflab::fd_gradient(f, lam, 1e-4 * (1.0 + lam.norm()));
        rflab::Vec n(lam.size());
        for (int i = 0; i < lam.size(); ++i)
          n(i) = e.model->module_dims()[i] / lam(i);
        n.normalize();
        j["residual"] = (g - g.dot(n) * n).norm();
        j["backend"] = "diagonal_scalar_model";
        j.update(spectrum_json(rflab::hessian_spectrum_coindex(*e.model, lam)));
      }
      std::cout << j.dump(2) << "\n";
      return 0;
    }

    if (c_flow->parsed()) {
      rflab::CatalogEntry e = resolve_entry(space_id);
      if (!e.space)
        throw rflab::input_error("flow integration needs structure-constant data");
      const rflab::HomogeneousSpace& space = *e.space;
      rflab::InvariantBasis basis = rflab::invariant_sym_basis(space);
      rflab::Mat P0 = metric_from_coeffs(space, basis, parse_coeffs(from_coeffs));

      rflab::IntegratorConfig cfg;
      cfg.rel_tol = rel_tol;
      cfg.abs_tol = abs_tol;
      cfg.max_step = max_step;
      cfg.horizon = std::abs(t1 - t0);
      rflab::Direction dir = t1 >= t0 ? rflab::Direction::forward : rflab::Direction::backward;

      rflab::FlowTrajectory traj;
      if (kind == "rf") {
        traj = rflab::ricci_flow(space, basis, P0, cfg, dir, t0);
      } else if (kind == "nrf") {
        double det = P0.determinant();
        P0 /= std::pow(det, 1.0 / space.dim_m());
        traj = rflab::normalized_flow(space, basis, P0, cfg, t0);
      } else {
        if (base_arg.empty())
          throw rflab::input_error("prf needs --base");
        rflab::HomogeneousSpace base = space.base_space();
        rflab::InvariantBasis base_basis = rflab::invariant_sym_basis(base);
        rflab::EinsteinPoint bp = resolve_base_einstein(e, base, base_basis, base_arg);
        rflab::ProjectedFlowContext ctx = rflab::make_projected_context(space, basis, bp.P);
        rflab::SubmersionMetric S0 = rflab::SubmersionMetric::split(space, P0);
        // project the start onto the sphere
        rflab::Vec y = basis.pack(S0.embed()).head(basis.sub_dim());
        y /= std::sqrt(ctx.inner_coeff(y, y));
        rflab::Mat Pn0 = basis.unpack_sub(y);
        S0 = rflab::SubmersionMetric::split(space, Pn0);
        traj = rflab::projected_flow(space, basis, ctx, S0, cfg, dir, t0);
      }

      if (out_path.empty())
        out_path = e.id + "_" + kind + ".csv";
      rflab::write_trajectory_csv(out_path, traj);
      rflab::RunManifest man;
      man.command = "flow";
      man.catalog_id = e.id;
      man.config = {{"kind", kind}, {"from", from_coeffs}, {"base", base_arg},
                    {"t0", t0}, {"t1", t1}, {"rel_tol", rel_tol}, {"abs_tol", abs_tol},
                    {"max_step", max_step}};
      man.outputs = {out_path};
      rflab::write_manifest(out_path + ".manifest.json", man);
      std::cout << "wrote " << out_path << " (" << traj.steps() << " rows, stop: "
                << rflab::to_string(traj.stop) << ")\n";
      return 0;
    }

    if (c_ancient->parsed()) {
      rflab::CatalogEntry e = resolve_entry(space_id);
      if (!e.space || !e.space->has_toral_split())
        throw rflab::input_error("'" + space_id + "' is not a torus fibration entry");
      const rflab::HomogeneousSpace& space = *e.space;
      rflab::InvariantBasis basis = rflab::invariant_sym_basis(space);
      rflab::HomogeneousSpace base = space.base_space();
      rflab::InvariantBasis base_basis = rflab::invariant_sym_basis(base);
      rflab::EinsteinPoint bp = resolve_base_einstein(e, base, base_basis, base_arg);
      rflab::CollapsedFixedPoint fp = rflab::linearize_at_collapse(space, basis, bp);

      std::cout << "fixed point: lambda=" << fp.lambda << " nu=" << fp.nu << " q=" << fp.q
                << " unstable=" << fp.unstable_dim()
                << " family_dimension=" << fp.unstable_dim() - 1 << "\n";

      if (out_path.empty())
        out_path = e.id + "_ancient.jsonl";
      if (traj_dir.empty())
        traj_dir = fs::path(out_path).parent_path().string();
      if (!traj_dir.empty())
        fs::create_directories(traj_dir);

      rflab::ShootConfig scfg;
      scfg.eps = eps;
      std::ofstream os(out_path, std::ios::binary);

      auto write_cand = [&](const rflab::AncientCandidate& cand, int idx) {
        std::string bpath, fpath;
        if (cand.backward.steps() > 0) {
          bpath = (fs::path(traj_dir) / (e.id + "_bwd_" + std::to_string(idx) + ".csv")).string();
          rflab::write_trajectory_csv(bpath, cand.backward);
        }
        if (cand.forward.steps() > 0) {
          fpath = (fs::path(traj_dir) / (e.id + "_fwd_" + std::to_string(idx) + ".csv")).string();
          rflab::write_trajectory_csv(fpath, cand.forward);
        }
        os << candidate_json(cand, fp, idx, bpath, fpath).dump() << '\n';
      };

      if (scan_n > 0) {
        rflab::FamilyScan scan = rflab::family_scan(space, basis, fp, scan_n, eps, scfg);
        for (int i = 0; i < static_cast<int>(scan.candidates.size()); ++i)
          write_cand(scan.candidates[i], i);
        std::cout << "scan: accepted=" << scan.accepted << " rejected=" << scan.rejected
                  << " degenerate_vertical=" << scan.degenerate
                  << " family_dimension=" << scan.family_dimension << "\n";
      } else {
        rflab::Vec c;
        if (!dir_coeffs.empty()) {
          c = parse_coeffs(dir_coeffs);
        } else {
          // canonical direction: identity on the fiber
          rflab::Mat idt = rflab::Mat::Zero(space.dim_m(), space.dim_m());
          idt.topLeftCorner(space.frame().t_dim, space.frame().t_dim) =
            rflab::Mat::Identity(space.frame().t_dim, space.frame().t_dim);
          rflab::Vec yt = basis.pack(idt).head(basis.sub_dim());
          c = rflab::Vec::Zero(fp.unstable_dim());
          c.head(fp.nu) = yt.head(fp.nu);
        }
        c.normalize();
        rflab::AncientCandidate cand = rflab::shoot_ancient(space, basis, fp, c, eps, scfg);
        write_cand(cand, 0);
        std::cout << (cand.accepted ? "accepted" : "rejected") << " candidate; min_distance="
                  << cand.min_distance << " decay_rate=" << cand.backward_decay_rate << "\n";
      }

      rflab::RunManifest man;
      man.command = "ancient";
      man.catalog_id = e.id;
      man.config = {{"base_einstein", base_arg}, {"eps", eps}, {"scan", scan_n},
                    {"dir", dir_coeffs}};
      man.outputs = {out_path};
      rflab::write_manifest(out_path + ".manifest.json", man);
      return 0;
    }

    if (c_plot->parsed()) {
      rflab::CsvTable tab = rflab::read_csv(space_id);
      std::vector<int> sel;
      {
        std::stringstream ss(columns);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
          int idx = tab.column_index(cell);
          if (idx < 0)
            throw rflab::input_error("no column '" + cell + "' in " + space_id);
          sel.push_back(idx);
        }
      }
      int stride = std::max(every, 1);
      if (max_points > 0 && static_cast<int>(tab.rows.size()) / stride > max_points)
        stride = static_cast<int>((tab.rows.size() + max_points - 1) / max_points);
      std::ostringstream body;
      for (size_t i = 0; i < sel.size(); ++i)
        body << (i ? "," : "") << tab.columns[sel[i]];
      body << '\n';
      for (size_t r = 0; r < tab.rows.size(); r += stride) {
        for (size_t i = 0; i < sel.size(); ++i)
          body << (i ? "," : "") << rflab::format_g17(tab.rows[r][sel[i]]);
        body << '\n';
      }
      if (!out_path.empty()) {
        std::ofstream osf(out_path, std::ios::binary);
        osf << body.str();
      } else {
        std::cout << body.str();
      }
      return 0;
    }
  } catch (const rflab::input_error& err) {
    std::cerr << "input error: " << err.what() << "\n";
    return 2;
  } catch (const rflab::search_error& err) {
    std::cerr << "search error: " << err.what()
              << " (best residual " << err.best_residual << ")\n";
    return 3;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 4;
  }
  return 0;
}
