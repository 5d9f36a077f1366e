#pragma once

#include <string>

#include "json.hpp"
#include "qso/abscont.hpp"
#include "qso/classify.hpp"
#include "qso/markov.hpp"
#include "qso/operator.hpp"

namespace qso {

// JSON views of the module results. Indices are 1-based; non-finite reals become null.

nlohmann::json to_json(const SimplexPoint& x);
nlohmann::json to_json(const Eigen::MatrixXd& m);
nlohmann::json to_json(const NecessaryConditions& c);
nlohmann::json to_json(const BVerdict& v);
nlohmann::json to_json(const UniquenessReport& u);
nlohmann::json to_json(const VertexStabilityReport& v);
nlohmann::json to_json(const ContractionReport& c);
nlohmann::json to_json(const ClassificationReport& r);
nlohmann::json to_json(const FixedPointSet& s);
nlohmann::json to_json(const CylinderSet& c);
nlohmann::json to_json(const MixingSeries& s);
nlohmann::json to_json(const RNSeriesReport& r);
nlohmann::json to_json(const HeuristicRNReport& r);

/// Envelope shared by every report.
nlohmann::json make_envelope(const std::string& command, const std::string& spec_sha256, nlohmann::json config,
                             nlohmann::json result);

}  // namespace qso
