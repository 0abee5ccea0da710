#include "marginpca/reducers.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>

#include <nlohmann/json.hpp>

#include "marginpca/errors.hpp"

namespace marginpca {

const char* scheme_name(Scheme s) {
  switch (s) {
    case Scheme::pca: return "pca";
    case Scheme::mpca0: return "mpca0";
    case Scheme::mpca1a: return "mpca1a";
    case Scheme::mpca1b: return "mpca1b";
    case Scheme::mpca2: return "mpca2";
    case Scheme::pls: return "pls";
    case Scheme::lasso: return "lasso";
  }
  return "?";
}

Scheme scheme_from_name(const std::string& name) {
  for (Scheme s : {Scheme::pca, Scheme::mpca0, Scheme::mpca1a, Scheme::mpca1b, Scheme::mpca2,
                   Scheme::pls, Scheme::lasso})
    if (name == scheme_name(s)) return s;
  throw_config("UnknownScheme", "no scheme named '" + name + "'");
}

namespace {

void check_k_at_least_one(std::size_t k) {
  if (k < 1) throw_config("InvalidK", "target dimension must be >= 1");
}

/// Shared tail of every eigenvector fit: rank gate, truncation, packing.
ProjectionModel pack_model(Scheme scheme, std::size_t k, std::size_t d,
                           const std::vector<EigenPair>& pairs, std::size_t rank,
                           Vector center) {
  if (k > rank)
    throw_numeric("KExceedsRank", std::string(scheme_name(scheme)) + ": k = " +
                                      std::to_string(k) + " exceeds proxy rank " +
                                      std::to_string(rank));
  ProjectionModel m;
  m.scheme = scheme;
  m.k = k;
  m.d = d;
  m.p = Matrix(k, d);
  m.eigenvalues.resize(k);
  for (std::size_t i = 0; i < k; ++i) {
    m.eigenvalues[i] = pairs[i].value;
    std::copy(pairs[i].vector.begin(), pairs[i].vector.end(), m.p.row_ptr(i));
  }
  m.center = std::move(center);
  if (m.center.empty()) m.center.assign(d, 0.0);
  return m;
}

/// Direct route: eigendecompose the D×D scatter itself.
ProjectionModel fit_from_scatter(Scheme scheme, const SymMatrix& a, std::size_t k,
                                 Vector center) {
  std::vector<EigenPair> pairs = sym_eig_all(a);
  const std::size_t rank = rank_from_eigenvalues(pairs);
  return pack_model(scheme, k, a.dim(), pairs, rank, std::move(center));
}

void fix_sign(Vector& v) {
  std::size_t best = 0;
  double best_abs = std::fabs(v[0]);
  for (std::size_t i = 1; i < v.size(); ++i) {
    const double a = std::fabs(v[i]);
    if (a > best_abs) {
      best_abs = a;
      best = i;
    }
  }
  if (v[best] < 0.0)
    for (double& x : v) x = -x;
}

/// Dual route for D > m: eigendecompose the m×m Gram of the proxy rows and
/// map u back to feature space as v = Zᵀu/√λ. A modified Gram–Schmidt pass
/// keeps the mapped vectors orthonormal at the contract tolerance even for
/// eigenvalues near the rank cutoff.
ProjectionModel fit_dual(Scheme scheme, const Matrix& z, std::size_t k, Vector center) {
  const std::size_t d = z.cols();
  SymMatrix gram = gram_accumulate_rows(transpose(z));  // Z Zᵀ, size m
  std::vector<EigenPair> gram_pairs = sym_eig_all(gram);
  const std::size_t rank = rank_from_eigenvalues(gram_pairs);
  if (k > rank)
    throw_numeric("KExceedsRank", std::string(scheme_name(scheme)) + ": k = " +
                                      std::to_string(k) + " exceeds proxy rank " +
                                      std::to_string(rank));

  std::vector<EigenPair> mapped(k);
  for (std::size_t a = 0; a < k; ++a) {
    const double lambda = gram_pairs[a].value;
    const Vector& u = gram_pairs[a].vector;
    Vector v(d, 0.0);
    for (std::size_t i = 0; i < z.rows(); ++i) {
      const double ui = u[i];
      const double* row = z.row_ptr(i);
      for (std::size_t j = 0; j < d; ++j) v[j] += ui * row[j];
    }
    const double inv = 1.0 / std::sqrt(lambda);
    for (double& x : v) x *= inv;
    for (std::size_t b = 0; b < a; ++b) {
      const double c = dot(mapped[b].vector, v);
      for (std::size_t j = 0; j < d; ++j) v[j] -= c * mapped[b].vector[j];
    }
    const double nrm = norm2(v);
    for (double& x : v) x /= nrm;
    fix_sign(v);
    mapped[a].value = lambda;
    mapped[a].vector = std::move(v);
  }
  return pack_model(scheme, k, d, mapped, k, std::move(center));
}

}  // namespace

ProjectionModel fit_pca(const Dataset& ds, std::size_t k) {
  check_k_at_least_one(k);
  Vector mu = column_means(ds.features);
  Matrix centered = subtract_row_vector(ds.features, mu);
  if (ds.d() <= ds.n())
    return fit_from_scatter(Scheme::pca, gram_accumulate_rows(centered), k, std::move(mu));
  return fit_dual(Scheme::pca, centered, k, std::move(mu));
}

SymMatrix mpca0_scatter(const Dataset& ds) {
  // expansion: A = N₊·M₋ + N₋·M₊ − S₋S₊ᵀ − S₊S₋ᵀ, arranged so that the
  // two class roles enter symmetrically and a label swap reproduces A
  // bit for bit.
  const std::size_t n = ds.n(), d = ds.d();
  const double n_neg = static_cast<double>(ds.count_label(-1));
  const double n_pos = static_cast<double>(ds.count_label(+1));
  SymMatrix scatter_neg = gram_accumulate_rows(select_rows(ds.features, ds.class_indices(-1)));
  SymMatrix scatter_pos = gram_accumulate_rows(select_rows(ds.features, ds.class_indices(+1)));
  Vector sum_neg(d, 0.0), sum_pos(d, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double* row = ds.features.row_ptr(i);
    Vector& target = (ds.labels[i] == -1) ? sum_neg : sum_pos;
    for (std::size_t j = 0; j < d; ++j) target[j] += row[j];
  }
  SymMatrix a(d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j <= i; ++j) {
      const double weighted = n_pos * scatter_neg(i, j) + n_neg * scatter_pos(i, j);
      const double cross = sum_neg[i] * sum_pos[j] + sum_pos[i] * sum_neg[j];
      a.set(i, j, weighted - cross);
    }
  return a;
}

ProjectionModel fit_mpca0(const Dataset& ds, std::size_t k) {
  check_k_at_least_one(k);
  const std::size_t n = ds.n(), d = ds.d();
  const double n_neg = static_cast<double>(ds.count_label(-1));
  const double n_pos = static_cast<double>(ds.count_label(+1));

  if (d <= n)
    return fit_from_scatter(Scheme::mpca0, mpca0_scatter(ds), k, Vector(d, 0.0));

  // D > N: A = Xᵀ B X with B the N×N pair-structure form
  //   B = N₊·diag(1₋) + N₋·diag(1₊) − 1₋1₊ᵀ − 1₊1₋ᵀ,
  // so factoring B = U diag(e) Uᵀ gives A = Z'ᵀZ' with Z' = diag(√e)UᵀX and
  // the usual N-sized dual applies.
  SymMatrix b(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j <= i; ++j) {
      double v;
      if (i == j)
        v = (ds.labels[i] == -1) ? n_pos : n_neg;
      else
        v = (ds.labels[i] != ds.labels[j]) ? -1.0 : 0.0;
      b.set(i, j, v);
    }
  std::vector<EigenPair> b_pairs = sym_eig_all(b);
  Matrix half(n, n);  // diag(√e) Uᵀ with tiny negative eigenvalues clamped
  for (std::size_t r = 0; r < n; ++r) {
    const double e = std::max(b_pairs[r].value, 0.0);
    const double s = std::sqrt(e);
    for (std::size_t c = 0; c < n; ++c) half(r, c) = s * b_pairs[r].vector[c];
  }
  Matrix virtual_proxies = matmul(half, ds.features);
  return fit_dual(Scheme::mpca0, virtual_proxies, k, Vector(d, 0.0));
}

Vector medoid(const std::vector<Vector>& points) {
  if (points.empty()) throw_numeric("EmptyInput", "medoid of an empty set");
  const std::size_t d = points.front().size();
  Vector out(d);
  std::vector<double> column(points.size());
  for (std::size_t j = 0; j < d; ++j) {
    for (std::size_t i = 0; i < points.size(); ++i) {
      if (points[i].size() != d) throw_numeric("DimensionMismatch", "medoid of ragged vectors");
      column[i] = points[i][j];
    }
    std::sort(column.begin(), column.end());
    const std::size_t m = column.size();
    out[j] = (m % 2 == 1) ? column[m / 2] : 0.5 * (column[m / 2 - 1] + column[m / 2]);
  }
  return out;
}

Matrix mpca1_proxies(const Dataset& ds, CenterStat stat) {
  const std::size_t n = ds.n(), d = ds.d();

  Vector center_neg, center_pos;
  if (stat == CenterStat::mean) {
    center_neg = column_means(select_rows(ds.features, ds.class_indices(-1)));
    center_pos = column_means(select_rows(ds.features, ds.class_indices(+1)));
  } else {
    auto rows_of = [&](int label) {
      std::vector<Vector> pts;
      for (std::size_t i : ds.class_indices(label)) pts.push_back(ds.features.row(i));
      return pts;
    };
    center_neg = medoid(rows_of(-1));
    center_pos = medoid(rows_of(+1));
  }

  // z_k in original row order, so a label swap only negates each z and the
  // accumulated scatter is bitwise unchanged
  Matrix z(n, d);
  for (std::size_t i = 0; i < n; ++i) {
    const double* x = ds.features.row_ptr(i);
    double* out = z.row_ptr(i);
    if (ds.labels[i] == -1)
      for (std::size_t j = 0; j < d; ++j) out[j] = x[j] - center_pos[j];
    else
      for (std::size_t j = 0; j < d; ++j) out[j] = center_neg[j] - x[j];
  }
  return z;
}

ProjectionModel fit_mpca1(const Dataset& ds, std::size_t k, CenterStat stat) {
  check_k_at_least_one(k);
  Matrix z = mpca1_proxies(ds, stat);
  const Scheme scheme = (stat == CenterStat::mean) ? Scheme::mpca1a : Scheme::mpca1b;
  if (ds.d() <= ds.n())
    return fit_from_scatter(scheme, gram_accumulate_rows(z), k, Vector(ds.d(), 0.0));
  return fit_dual(scheme, z, k, Vector(ds.d(), 0.0));
}

std::vector<std::pair<std::size_t, std::size_t>> mpca2_pairs(const Dataset& ds) {
  const std::vector<std::size_t> neg = ds.class_indices(-1);
  const std::vector<std::size_t> pos = ds.class_indices(+1);

  auto nearest = [&](std::size_t query, const std::vector<std::size_t>& candidates) {
    std::size_t best = candidates.front();
    double best_dist = -1.0;
    const double* q = ds.features.row_ptr(query);
    for (std::size_t c : candidates) {
      const double* p = ds.features.row_ptr(c);
      double dist = 0.0;
      for (std::size_t j = 0; j < ds.d(); ++j) {
        const double diff = q[j] - p[j];
        dist += diff * diff;
      }
      if (best_dist < 0.0 || dist < best_dist) {  // ties keep the lowest index
        best_dist = dist;
        best = c;
      }
    }
    return best;
  };

  std::vector<std::pair<std::size_t, std::size_t>> pairs;  // (positive, negative)
  for (std::size_t j : neg) pairs.emplace_back(nearest(j, pos), j);
  for (std::size_t i : pos) pairs.emplace_back(i, nearest(i, neg));

  // canonical order and dedup on the unordered index pair, so mutual
  // neighbors count once and a label swap replays the same sequence
  std::sort(pairs.begin(), pairs.end(),
            [](const std::pair<std::size_t, std::size_t>& a,
               const std::pair<std::size_t, std::size_t>& b) {
              const auto ka = std::minmax(a.first, a.second);
              const auto kb = std::minmax(b.first, b.second);
              return ka < kb;
            });
  pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
  return pairs;
}

ProjectionModel fit_mpca2(const Dataset& ds, std::size_t k) {
  check_k_at_least_one(k);
  const std::size_t d = ds.d();
  std::vector<std::pair<std::size_t, std::size_t>> pairs = mpca2_pairs(ds);

  Matrix z(pairs.size(), d);
  for (std::size_t r = 0; r < pairs.size(); ++r) {
    const double* xi = ds.features.row_ptr(pairs[r].first);
    const double* xj = ds.features.row_ptr(pairs[r].second);
    double* out = z.row_ptr(r);
    for (std::size_t j = 0; j < d; ++j) out[j] = xi[j] - xj[j];
  }
  if (d <= z.rows()) return fit_from_scatter(Scheme::mpca2, gram_accumulate_rows(z), k, Vector(d, 0.0));
  return fit_dual(Scheme::mpca2, z, k, Vector(d, 0.0));
}

Matrix transform(const ProjectionModel& m, const Matrix& x) {
  if (x.cols() != m.d)
    throw_numeric("DimensionMismatch", "transform: input has " + std::to_string(x.cols()) +
                                           " columns, model expects " + std::to_string(m.d));
  return matmul_bt(subtract_row_vector(x, m.center), m.p);
}

std::string model_to_json(const ProjectionModel& m) {
  nlohmann::json j;
  j["schema"] = "marginpca.model/1";
  j["scheme"] = scheme_name(m.scheme);
  j["k"] = m.k;
  j["d"] = m.d;
  j["center"] = m.center;
  j["eigenvalues"] = m.eigenvalues;
  j["p"] = m.p.data();  // row-major K×D
  return j.dump(2) + "\n";
}

ProjectionModel model_from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
  if (j.is_discarded()) throw_data("MalformedModel", "model JSON does not parse");
  try {
    ProjectionModel m;
    m.scheme = scheme_from_name(j.at("scheme").get<std::string>());
    m.k = j.at("k").get<std::size_t>();
    m.d = j.at("d").get<std::size_t>();
    m.center = j.at("center").get<Vector>();
    m.eigenvalues = j.at("eigenvalues").get<Vector>();
    std::vector<double> flat = j.at("p").get<std::vector<double>>();
    if (flat.size() != m.k * m.d || m.center.size() != m.d || m.eigenvalues.size() != m.k)
      throw_data("MalformedModel", "model JSON has inconsistent shapes");
    m.p = Matrix(m.k, m.d);
    std::copy(flat.begin(), flat.end(), m.p.data().begin());
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw_data("MalformedModel", e.what());
  }
}

}  // namespace marginpca
