#pragma once

// JSON persistence of fields, metrics and eigenpairs, and the named inputs
// accepted by the command line tools.

#include "curllab/curlspec.hpp"
#include "curllab/dynamics.hpp"
#include "curllab/fourier_field.hpp"
#include "curllab/metric.hpp"
#include "curllab/vector_field.hpp"

#include <json.hpp>

#include <string>

namespace curllab::io {

using fields::FourierField;
using fields::MetricField;

/// {"rank": ..., "N": ..., "coeffs": [[m1, m2, m3, component, re, im], ...]}
/// listing the nonzero coefficients in storage order. Omitted coefficients
/// are zero; the coefficients must describe a real field.
nlohmann::json to_json(const FourierField& f);
FourierField field_from_json(const nlohmann::json& j);

/// Same layout with rank "metric" and components 0..5 in the packed order
/// xx, xy, xz, yy, yz, zz.
nlohmann::json to_json(const MetricField& g);
MetricField metric_from_json(const nlohmann::json& j);

nlohmann::json to_json(const curlspec::EigenPair& p);
curlspec::EigenPair eigenpair_from_json(const nlohmann::json& j);

nlohmann::json to_json(const Eigen::Vector3d& v);
nlohmann::json to_json(const dynamics::FixedPointRecord& r);
nlohmann::json to_json(const dynamics::PeriodicOrbitRecord& r);

/// Throws IoError naming the path.
nlohmann::json read_json(const std::string& path);
void write_text(const std::string& path, const std::string& text);

/// "flat", "conformal(c)", "random_cr(r, eps, seed)" or a metric file.
MetricField load_metric(const std::string& spec);

/// "xi:k", "abc:A,B,C", or a file holding a one_form field or an eigenpair.
FourierField load_form(const std::string& spec, int truncation = 0);

/// "abc:A,B,C" (analytic), "xi:k" (the vector field (sin kz, cos kz, 0)), or
/// a file: a vector field, a one_form (raised with g) or an eigenpair (its
/// form raised with g).
dynamics::VectorFieldPtr load_vector_field(const std::string& spec, const MetricField& g);

}  // namespace curllab::io
