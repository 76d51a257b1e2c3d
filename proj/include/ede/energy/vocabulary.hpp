#pragma once

#include <string_view>

// Global-schema IRIs. The cim: terms live under a project-local namespace.
namespace ede::energy::vocab {

inline constexpr std::string_view kEnergy = "http://w3id.org/energy/";
inline constexpr std::string_view kCim = "http://ede.local/cim#";
inline constexpr std::string_view kResource = "http://ede.local/resource/";
inline constexpr std::string_view kReference = "http://ede.local/reference/";
inline constexpr std::string_view kWd = "http://www.wikidata.org/entity/";
inline constexpr std::string_view kWdt = "http://www.wikidata.org/prop/direct/";

inline constexpr std::string_view GenerationCapacity = "http://w3id.org/energy/GenerationCapacity";
inline constexpr std::string_view productionType = "http://w3id.org/energy/productionType";
inline constexpr std::string_view country = "http://w3id.org/energy/country";
inline constexpr std::string_view measure = "http://w3id.org/energy/measure";
inline constexpr std::string_view agg_year = "http://w3id.org/energy/agg_year";
inline constexpr std::string_view dataSource = "http://w3id.org/energy/dataSource";
inline constexpr std::string_view TransparencyPlatform = "http://w3id.org/energy/TransparencyPlatform";
inline constexpr std::string_view ProductionType = "http://w3id.org/energy/ProductionType";
inline constexpr std::string_view productionTypeBase = "http://w3id.org/energy/productionType/";

inline constexpr std::string_view PowerSystemResource = "http://ede.local/cim#PowerSystemResource";
inline constexpr std::string_view EquipmentContainer = "http://ede.local/cim#EquipmentContainer";
inline constexpr std::string_view RegisteredResource = "http://ede.local/cim#RegisteredResource";
inline constexpr std::string_view HostControlArea = "http://ede.local/cim#HostControlArea";
inline constexpr std::string_view ControlAreaOperator = "http://ede.local/cim#ControlAreaOperator";
inline constexpr std::string_view Frequency = "http://ede.local/cim#Frequency";
inline constexpr std::string_view Plant = "http://ede.local/cim#Plant";
inline constexpr std::string_view ActivePower = "http://ede.local/cim#ActivePower";
inline constexpr std::string_view ReserveReq = "http://ede.local/cim#ReserveReq";
inline constexpr std::string_view Agreement = "http://ede.local/cim#Agreement";
inline constexpr std::string_view BalanceSupplier = "http://ede.local/cim#BalanceSupplier";

inline constexpr std::string_view rdf_type = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";
inline constexpr std::string_view rdfs_label = "http://www.w3.org/2000/01/rdf-schema#label";
inline constexpr std::string_view owl_sameAs = "http://www.w3.org/2002/07/owl#sameAs";
inline constexpr std::string_view wdt_P279 = "http://www.wikidata.org/prop/direct/P279";
inline constexpr std::string_view wd_Q12705 = "http://www.wikidata.org/entity/Q12705";

inline constexpr std::string_view xsd_decimal = "http://www.w3.org/2001/XMLSchema#decimal";
inline constexpr std::string_view xsd_dateTime = "http://www.w3.org/2001/XMLSchema#dateTime";

/// Every constant above that names a term (namespaces excluded).
inline constexpr std::string_view kTerms[] = {
    GenerationCapacity, productionType, country, measure, agg_year, dataSource, TransparencyPlatform,
    ProductionType, PowerSystemResource, EquipmentContainer, RegisteredResource, HostControlArea,
    ControlAreaOperator, Frequency, Plant, ActivePower, ReserveReq, Agreement, BalanceSupplier,
    rdf_type, rdfs_label, owl_sameAs, wdt_P279, wd_Q12705};

}  // namespace ede::energy::vocab
