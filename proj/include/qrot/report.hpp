#pragma once

#include <string>
#include <vector>

#include "qrot/certify.hpp"

namespace qrot {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr const char* kCertificateFormat = "qrot-certificate/1";

/// Certificate as indented JSON. Output depends only on the certificate
/// contents, never on the thread count.
std::string certificate_json(const CaseData& cd, const Certificate& cert);

std::string verdict_text(const CaseData& cd, const Point& z, const Verdict& v);
std::string verdict_json(const CaseData& cd, const Point& z, const Verdict& v);

/// Columns x, y, verdict, period.
std::string scan_csv(const std::vector<ScanRow>& rows);
/// One square per grid point, black for aperiodic and light grey for
/// periodic; y grows upwards.
std::string scan_svg(const std::vector<ScanRow>& rows, long Q);
std::string scan_json(const CaseData& cd, long Q, const std::vector<ScanRow>& rows);

std::string period_table_text(const std::vector<PeriodCheck>& rows);
std::string period_table_csv(const std::vector<PeriodCheck>& rows);
std::string period_table_json(const CaseData& cd, const std::vector<PeriodCheck>& rows);

std::string checks_text(const std::vector<CheckResult>& rows);
std::string checks_json(const CaseData& cd, const std::vector<CheckResult>& rows);

}  // namespace qrot
