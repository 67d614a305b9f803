// Deterministic benchmark-dataset generator. Emits tab-separated
// train/valid/test triple files at the published desk-scale shapes:
//   Countries-S1/S2/S3: real country -> subregion -> region facts plus land
//     borders, with the S1/S2/S3 held-out-region protocols.
//   UMLS: 135 biomedical semantic types, 46 relations, rule-generated triples
//     subsampled to 5216/652/661.
//   KINSHIP: 104 persons, 25 kin terms from a section/generation rule table,
//     subsampled to 8544/1068/1074.
// Everything is seeded; reruns reproduce the files byte-for-byte.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "kge/rng.hpp"

namespace fs = std::filesystem;
using kge::Rng;

namespace {

struct RawTriple {
    std::string h, r, t;
    bool operator<(const RawTriple& o) const {
        return std::tie(h, r, t) < std::tie(o.h, o.r, o.t);
    }
    bool operator==(const RawTriple& o) const = default;
};

void write_split(const fs::path& dir, const char* name, const std::vector<RawTriple>& triples) {
    fs::create_directories(dir);
    std::ofstream out(dir / name, std::ios::binary | std::ios::trunc);
    for (const auto& t : triples) out << t.h << '\t' << t.r << '\t' << t.t << '\n';
}

// ---------------------------------------------------------------- countries

struct Subregion {
    const char* name;
    const char* region;
    std::vector<const char*> countries;
};

const std::vector<Subregion>& subregions() {
    static const std::vector<Subregion> data = {
        {"northern_africa", "africa",
         {"algeria", "egypt", "libya", "morocco", "sudan", "tunisia", "western_sahara"}},
        {"eastern_africa", "africa",
         {"burundi", "comoros", "djibouti", "eritrea", "ethiopia", "kenya", "madagascar",
          "malawi", "mauritius", "mayotte", "mozambique", "reunion", "rwanda", "seychelles",
          "somalia", "south_sudan", "tanzania", "uganda", "zambia", "zimbabwe"}},
        {"middle_africa", "africa",
         {"angola", "cameroon", "central_african_republic", "chad", "congo",
          "democratic_republic_of_the_congo", "equatorial_guinea", "gabon",
          "sao_tome_and_principe"}},
        {"southern_africa", "africa",
         {"botswana", "lesotho", "namibia", "south_africa", "swaziland"}},
        {"western_africa", "africa",
         {"benin", "burkina_faso", "cape_verde", "cote_divoire", "gambia", "ghana", "guinea",
          "guinea_bissau", "liberia", "mali", "mauritania", "niger", "nigeria", "saint_helena",
          "senegal", "sierra_leone", "togo"}},
        {"caribbean", "americas",
         {"anguilla", "antigua_and_barbuda", "aruba", "bahamas", "barbados",
          "british_virgin_islands", "cayman_islands", "cuba", "curacao", "dominica",
          "dominican_republic", "grenada", "guadeloupe", "haiti", "jamaica", "martinique",
          "montserrat", "puerto_rico", "saint_kitts_and_nevis", "saint_lucia",
          "saint_vincent_and_the_grenadines", "sint_maarten", "trinidad_and_tobago",
          "turks_and_caicos_islands", "united_states_virgin_islands"}},
        {"central_america", "americas",
         {"belize", "costa_rica", "el_salvador", "guatemala", "honduras", "mexico", "nicaragua",
          "panama"}},
        {"northern_america", "americas",
         {"bermuda", "canada", "greenland", "saint_pierre_and_miquelon", "united_states"}},
        {"south_america", "americas",
         {"argentina", "bolivia", "brazil", "chile", "colombia", "ecuador", "falkland_islands",
          "french_guiana", "guyana", "paraguay", "peru", "suriname", "uruguay", "venezuela"}},
        {"central_asia", "asia",
         {"kazakhstan", "kyrgyzstan", "tajikistan", "turkmenistan", "uzbekistan"}},
        {"eastern_asia", "asia",
         {"china", "hong_kong", "japan", "macao", "mongolia", "north_korea", "south_korea",
          "taiwan"}},
        {"south_eastern_asia", "asia",
         {"brunei", "cambodia", "indonesia", "laos", "malaysia", "myanmar", "philippines",
          "singapore", "thailand", "timor_leste", "vietnam"}},
        {"southern_asia", "asia",
         {"afghanistan", "bangladesh", "bhutan", "india", "iran", "maldives", "nepal",
          "pakistan", "sri_lanka"}},
        {"western_asia", "asia",
         {"armenia", "azerbaijan", "bahrain", "cyprus", "georgia", "iraq", "israel", "jordan",
          "kuwait", "lebanon", "oman", "palestine", "qatar", "saudi_arabia", "syria", "turkey",
          "united_arab_emirates", "yemen"}},
        {"eastern_europe", "europe",
         {"belarus", "bulgaria", "czech_republic", "hungary", "moldova", "poland", "romania",
          "russia", "slovakia", "ukraine"}},
        {"northern_europe", "europe",
         {"aland_islands", "denmark", "estonia", "faroe_islands", "finland", "guernsey",
          "iceland", "ireland", "isle_of_man", "jersey", "latvia", "lithuania", "norway",
          "sweden", "united_kingdom"}},
        {"southern_europe", "europe",
         {"albania", "andorra", "bosnia_and_herzegovina", "croatia", "gibraltar", "greece",
          "italy", "kosovo", "macedonia", "malta", "montenegro", "portugal", "san_marino",
          "serbia", "slovenia", "spain", "vatican_city"}},
        {"western_europe", "europe",
         {"austria", "belgium", "france", "germany", "liechtenstein", "luxembourg", "monaco",
          "netherlands", "switzerland"}},
        {"australia_and_new_zealand", "oceania",
         {"australia", "christmas_island", "cocos_islands", "new_zealand", "norfolk_island"}},
        {"melanesia", "oceania",
         {"fiji", "new_caledonia", "papua_new_guinea", "solomon_islands", "vanuatu"}},
        {"micronesia", "oceania",
         {"guam", "kiribati", "marshall_islands", "federated_states_of_micronesia", "nauru",
          "northern_mariana_islands", "palau"}},
        {"polynesia", "oceania",
         {"american_samoa", "cook_islands", "french_polynesia", "niue", "pitcairn", "samoa",
          "tokelau", "tonga", "tuvalu", "wallis_and_futuna"}},
    };
    return data;
}

const std::vector<std::pair<const char*, const char*>>& borders() {
    static const std::vector<std::pair<const char*, const char*>> data = {
        // europe
        {"portugal", "spain"}, {"spain", "france"}, {"spain", "andorra"}, {"france", "andorra"},
        {"spain", "gibraltar"}, {"spain", "morocco"}, {"france", "monaco"}, {"france", "belgium"},
        {"france", "luxembourg"}, {"france", "germany"}, {"france", "switzerland"},
        {"france", "italy"}, {"belgium", "netherlands"}, {"belgium", "luxembourg"},
        {"belgium", "germany"}, {"netherlands", "germany"}, {"luxembourg", "germany"},
        {"germany", "denmark"}, {"germany", "poland"}, {"germany", "czech_republic"},
        {"germany", "austria"}, {"germany", "switzerland"}, {"switzerland", "italy"},
        {"switzerland", "austria"}, {"switzerland", "liechtenstein"},
        {"austria", "liechtenstein"}, {"austria", "italy"}, {"austria", "slovenia"},
        {"austria", "hungary"}, {"austria", "slovakia"}, {"austria", "czech_republic"},
        {"italy", "slovenia"}, {"italy", "san_marino"}, {"italy", "vatican_city"},
        {"slovenia", "croatia"}, {"slovenia", "hungary"}, {"croatia", "hungary"},
        {"croatia", "serbia"}, {"croatia", "bosnia_and_herzegovina"}, {"croatia", "montenegro"},
        {"bosnia_and_herzegovina", "serbia"}, {"bosnia_and_herzegovina", "montenegro"},
        {"serbia", "montenegro"}, {"serbia", "hungary"}, {"serbia", "romania"},
        {"serbia", "bulgaria"}, {"serbia", "macedonia"}, {"serbia", "kosovo"},
        {"kosovo", "montenegro"}, {"kosovo", "macedonia"}, {"kosovo", "albania"},
        {"montenegro", "albania"}, {"albania", "macedonia"}, {"albania", "greece"},
        {"macedonia", "greece"}, {"macedonia", "bulgaria"}, {"greece", "bulgaria"},
        {"greece", "turkey"}, {"bulgaria", "turkey"}, {"bulgaria", "romania"},
        {"romania", "hungary"}, {"romania", "ukraine"}, {"romania", "moldova"},
        {"moldova", "ukraine"}, {"hungary", "ukraine"}, {"hungary", "slovakia"},
        {"slovakia", "ukraine"}, {"slovakia", "poland"}, {"slovakia", "czech_republic"},
        {"poland", "czech_republic"}, {"poland", "ukraine"}, {"poland", "belarus"},
        {"poland", "lithuania"}, {"poland", "russia"}, {"lithuania", "latvia"},
        {"lithuania", "belarus"}, {"lithuania", "russia"}, {"latvia", "estonia"},
        {"latvia", "russia"}, {"latvia", "belarus"}, {"estonia", "russia"},
        {"belarus", "russia"}, {"belarus", "ukraine"}, {"ukraine", "russia"},
        {"russia", "finland"}, {"russia", "norway"}, {"finland", "norway"},
        {"finland", "sweden"}, {"norway", "sweden"}, {"ireland", "united_kingdom"},
        // asia
        {"russia", "georgia"}, {"russia", "azerbaijan"}, {"russia", "kazakhstan"},
        {"russia", "mongolia"}, {"russia", "china"}, {"russia", "north_korea"},
        {"georgia", "armenia"}, {"georgia", "azerbaijan"}, {"georgia", "turkey"},
        {"armenia", "azerbaijan"}, {"armenia", "turkey"}, {"armenia", "iran"},
        {"azerbaijan", "iran"}, {"azerbaijan", "turkey"}, {"turkey", "iran"},
        {"turkey", "iraq"}, {"turkey", "syria"}, {"syria", "iraq"}, {"syria", "jordan"},
        {"syria", "lebanon"}, {"syria", "israel"}, {"israel", "lebanon"}, {"israel", "jordan"},
        {"israel", "palestine"}, {"israel", "egypt"}, {"jordan", "palestine"},
        {"jordan", "iraq"}, {"jordan", "saudi_arabia"}, {"iraq", "iran"}, {"iraq", "kuwait"},
        {"iraq", "saudi_arabia"}, {"kuwait", "saudi_arabia"}, {"saudi_arabia", "qatar"},
        {"saudi_arabia", "united_arab_emirates"}, {"saudi_arabia", "oman"},
        {"saudi_arabia", "yemen"}, {"united_arab_emirates", "oman"}, {"oman", "yemen"},
        {"iran", "afghanistan"}, {"iran", "pakistan"}, {"iran", "turkmenistan"},
        {"afghanistan", "pakistan"}, {"afghanistan", "turkmenistan"},
        {"afghanistan", "uzbekistan"}, {"afghanistan", "tajikistan"}, {"afghanistan", "china"},
        {"pakistan", "india"}, {"pakistan", "china"}, {"india", "china"}, {"india", "nepal"},
        {"india", "bhutan"}, {"india", "bangladesh"}, {"india", "myanmar"}, {"nepal", "china"},
        {"bhutan", "china"}, {"bangladesh", "myanmar"}, {"myanmar", "china"},
        {"myanmar", "laos"}, {"myanmar", "thailand"}, {"china", "mongolia"},
        {"china", "kazakhstan"}, {"china", "kyrgyzstan"}, {"china", "tajikistan"},
        {"china", "laos"}, {"china", "vietnam"}, {"china", "north_korea"},
        {"china", "hong_kong"}, {"china", "macao"}, {"kazakhstan", "kyrgyzstan"},
        {"kazakhstan", "uzbekistan"}, {"kazakhstan", "turkmenistan"},
        {"kyrgyzstan", "uzbekistan"}, {"kyrgyzstan", "tajikistan"},
        {"uzbekistan", "tajikistan"}, {"uzbekistan", "turkmenistan"}, {"laos", "vietnam"},
        {"laos", "thailand"}, {"laos", "cambodia"}, {"vietnam", "cambodia"},
        {"cambodia", "thailand"}, {"thailand", "malaysia"}, {"malaysia", "brunei"},
        {"malaysia", "indonesia"}, {"indonesia", "timor_leste"},
        {"indonesia", "papua_new_guinea"}, {"north_korea", "south_korea"},
        // africa
        {"morocco", "algeria"}, {"morocco", "western_sahara"}, {"algeria", "western_sahara"},
        {"algeria", "mauritania"}, {"algeria", "mali"}, {"algeria", "niger"},
        {"algeria", "libya"}, {"algeria", "tunisia"}, {"tunisia", "libya"},
        {"libya", "egypt"}, {"libya", "chad"}, {"libya", "niger"}, {"libya", "sudan"},
        {"egypt", "sudan"}, {"sudan", "south_sudan"}, {"sudan", "chad"}, {"sudan", "eritrea"},
        {"sudan", "ethiopia"}, {"sudan", "central_african_republic"},
        {"south_sudan", "ethiopia"}, {"south_sudan", "kenya"}, {"south_sudan", "uganda"},
        {"south_sudan", "democratic_republic_of_the_congo"},
        {"south_sudan", "central_african_republic"}, {"eritrea", "ethiopia"},
        {"eritrea", "djibouti"}, {"ethiopia", "djibouti"}, {"ethiopia", "somalia"},
        {"ethiopia", "kenya"}, {"djibouti", "somalia"}, {"somalia", "kenya"},
        {"kenya", "uganda"}, {"kenya", "tanzania"}, {"uganda", "tanzania"},
        {"uganda", "rwanda"}, {"uganda", "democratic_republic_of_the_congo"},
        {"rwanda", "burundi"}, {"rwanda", "tanzania"},
        {"rwanda", "democratic_republic_of_the_congo"}, {"burundi", "tanzania"},
        {"burundi", "democratic_republic_of_the_congo"}, {"tanzania", "mozambique"},
        {"tanzania", "malawi"}, {"tanzania", "zambia"},
        {"tanzania", "democratic_republic_of_the_congo"}, {"mozambique", "malawi"},
        {"mozambique", "zambia"}, {"mozambique", "zimbabwe"}, {"mozambique", "south_africa"},
        {"mozambique", "swaziland"}, {"malawi", "zambia"}, {"zambia", "zimbabwe"},
        {"zambia", "angola"}, {"zambia", "democratic_republic_of_the_congo"},
        {"zambia", "namibia"}, {"zambia", "botswana"}, {"zimbabwe", "botswana"},
        {"zimbabwe", "south_africa"}, {"botswana", "namibia"}, {"botswana", "south_africa"},
        {"namibia", "south_africa"}, {"namibia", "angola"}, {"south_africa", "lesotho"},
        {"south_africa", "swaziland"}, {"angola", "democratic_republic_of_the_congo"},
        {"angola", "congo"}, {"democratic_republic_of_the_congo", "congo"},
        {"democratic_republic_of_the_congo", "central_african_republic"},
        {"congo", "central_african_republic"}, {"congo", "gabon"}, {"congo", "cameroon"},
        {"gabon", "cameroon"}, {"gabon", "equatorial_guinea"},
        {"cameroon", "equatorial_guinea"}, {"cameroon", "central_african_republic"},
        {"cameroon", "chad"}, {"cameroon", "nigeria"}, {"central_african_republic", "chad"},
        {"chad", "niger"}, {"chad", "nigeria"}, {"niger", "nigeria"}, {"niger", "mali"},
        {"niger", "burkina_faso"}, {"niger", "benin"}, {"nigeria", "benin"},
        {"benin", "togo"}, {"benin", "burkina_faso"}, {"togo", "ghana"},
        {"togo", "burkina_faso"}, {"ghana", "burkina_faso"}, {"ghana", "cote_divoire"},
        {"cote_divoire", "burkina_faso"}, {"cote_divoire", "mali"},
        {"cote_divoire", "liberia"}, {"cote_divoire", "guinea"}, {"burkina_faso", "mali"},
        {"mali", "mauritania"}, {"mali", "senegal"}, {"mali", "guinea"},
        {"mauritania", "senegal"}, {"mauritania", "western_sahara"}, {"senegal", "gambia"},
        {"senegal", "guinea_bissau"}, {"senegal", "guinea"}, {"guinea_bissau", "guinea"},
        {"guinea", "liberia"}, {"guinea", "sierra_leone"}, {"sierra_leone", "liberia"},
        // americas
        {"canada", "united_states"}, {"united_states", "mexico"}, {"mexico", "guatemala"},
        {"mexico", "belize"}, {"guatemala", "belize"}, {"guatemala", "honduras"},
        {"guatemala", "el_salvador"}, {"honduras", "el_salvador"}, {"honduras", "nicaragua"},
        {"nicaragua", "costa_rica"}, {"costa_rica", "panama"}, {"panama", "colombia"},
        {"colombia", "venezuela"}, {"colombia", "ecuador"}, {"colombia", "peru"},
        {"colombia", "brazil"}, {"venezuela", "brazil"}, {"venezuela", "guyana"},
        {"guyana", "brazil"}, {"guyana", "suriname"}, {"suriname", "brazil"},
        {"suriname", "french_guiana"}, {"french_guiana", "brazil"}, {"brazil", "peru"},
        {"brazil", "bolivia"}, {"brazil", "paraguay"}, {"brazil", "argentina"},
        {"brazil", "uruguay"}, {"peru", "ecuador"}, {"peru", "bolivia"}, {"peru", "chile"},
        {"bolivia", "chile"}, {"bolivia", "paraguay"}, {"bolivia", "argentina"},
        {"chile", "argentina"}, {"paraguay", "argentina"}, {"argentina", "uruguay"},
        {"haiti", "dominican_republic"},
    };
    return data;
}

void make_countries(const fs::path& out_root, int variant) {
    std::map<std::string, std::string> subregion_of, region_of_sub;
    std::vector<std::string> countries;
    for (const auto& sub : subregions()) {
        region_of_sub[sub.name] = sub.region;
        for (const char* c : sub.countries) {
            subregion_of[c] = sub.name;
            countries.push_back(c);
        }
    }
    std::map<std::string, std::set<std::string>> neighbor;
    for (const auto& [a, b] : borders()) {
        neighbor[a].insert(b);
        neighbor[b].insert(a);
    }

    // held-out countries: 24 valid + 24 test, bordered ones only, seeded;
    // germany stays in train as the seen scoring anchor
    std::vector<std::string> bordered;
    for (const auto& c : countries)
        if (neighbor.count(c) && c != std::string("germany")) bordered.push_back(c);
    Rng rng(20240 + static_cast<std::uint64_t>(variant));
    rng.shuffle(bordered);
    const std::set<std::string> valid_set(bordered.begin(), bordered.begin() + 24);
    const std::set<std::string> test_set(bordered.begin() + 24, bordered.begin() + 48);

    std::set<std::string> held;  // countries with the region edge removed
    held.insert(valid_set.begin(), valid_set.end());
    held.insert(test_set.begin(), test_set.end());

    // region edges of held countries' neighbors are dropped entirely in S3
    std::set<std::string> neighbor_drop;
    if (variant == 3)
        for (const auto& c : held)
            for (const auto& n : neighbor[c])
                if (!held.count(n)) neighbor_drop.insert(n);

    std::vector<RawTriple> train, valid, test;
    for (const auto& c : countries) {
        const std::string& sub = subregion_of[c];
        const std::string& reg = region_of_sub[sub];
        const bool is_held = held.count(c) > 0;
        if (!(variant >= 2 && is_held))  // S2/S3 drop the subregion edge too
            train.push_back({c, "locatedin", sub});
        if (is_held) {
            (valid_set.count(c) ? valid : test).push_back({c, "locatedin", reg});
        } else if (!neighbor_drop.count(c)) {
            train.push_back({c, "locatedin", reg});
        }
    }
    for (const auto& [sub, reg] : region_of_sub) train.push_back({sub, "locatedin", reg});
    for (const auto& [a, b] : borders()) {
        train.push_back({a, "neighborof", b});
        train.push_back({b, "neighborof", a});
    }

    const fs::path dir = out_root / ("Countries-S" + std::to_string(variant));
    write_split(dir, "train.txt", train);
    write_split(dir, "valid.txt", valid);
    write_split(dir, "test.txt", test);
    std::printf("Countries-S%d: %zu train, %zu valid, %zu test\n", variant, train.size(),
                valid.size(), test.size());
}

// ---------------------------------------------------------------- umls

struct TypeGroup {
    const char* name;
    std::vector<const char*> members;
};

const std::vector<TypeGroup>& umls_groups() {
    static const std::vector<TypeGroup> data = {
        {"organism",
         {"organism", "archaeon", "bacterium", "rickettsia_or_chlamydia", "virus", "fungus",
          "alga", "plant", "animal", "invertebrate", "vertebrate", "amphibian", "bird", "fish",
          "reptile", "mammal", "human"}},
        {"anatomy",
         {"anatomical_structure", "embryonic_structure", "congenital_abnormality",
          "acquired_abnormality", "fully_formed_anatomical_structure", "body_system",
          "body_part_organ_or_organ_component", "tissue", "cell", "cell_component",
          "gene_or_genome", "body_location_or_region", "body_space_or_junction",
          "anatomical_abnormality"}},
        {"function",
         {"biologic_function", "physiologic_function", "organism_function",
          "organ_or_tissue_function", "cell_function", "molecular_function",
          "genetic_function", "mental_process"}},
        {"dysfunction",
         {"pathologic_function", "disease_or_syndrome", "mental_or_behavioral_dysfunction",
          "neoplastic_process", "cell_or_molecular_dysfunction",
          "experimental_model_of_disease"}},
        {"chemical",
         {"chemical", "chemical_viewed_functionally", "chemical_viewed_structurally",
          "organic_chemical", "inorganic_chemical", "element_ion_or_isotope",
          "biomedical_or_dental_material", "indicator_reagent_or_diagnostic_aid",
          "hazardous_or_poisonous_substance", "lipid", "steroid", "eicosanoid",
          "nucleic_acid_nucleoside_or_nucleotide", "amino_acid_peptide_or_protein",
          "carbohydrate"}},
        {"bioactive",
         {"pharmacologic_substance", "antibiotic", "biologically_active_substance",
          "neuroreactive_substance_or_biogenic_amine", "hormone", "enzyme", "vitamin",
          "immunologic_factor", "receptor", "clinical_drug"}},
        {"object",
         {"entity", "physical_object", "manufactured_object", "medical_device",
          "research_device", "drug_delivery_device", "substance", "body_substance", "food"}},
        {"finding",
         {"finding", "laboratory_or_test_result", "sign_or_symptom", "injury_or_poisoning"}},
        {"phenomenon",
         {"phenomenon_or_process", "human_caused_phenomenon_or_process",
          "natural_phenomenon_or_process", "environmental_effect_of_humans", "event"}},
        {"activity",
         {"activity", "behavior", "social_behavior", "individual_behavior",
          "daily_or_recreational_activity", "occupational_activity",
          "governmental_or_regulatory_activity", "educational_activity", "machine_activity"}},
        {"procedure",
         {"health_care_activity", "laboratory_procedure", "diagnostic_procedure",
          "therapeutic_or_preventive_procedure", "research_activity",
          "molecular_biology_research_technique", "genetic_technique"}},
        {"concept",
         {"conceptual_entity", "idea_or_concept", "temporal_concept", "qualitative_concept",
          "quantitative_concept", "spatial_concept", "functional_concept", "geographic_area",
          "regulation_or_law", "language", "intellectual_product", "classification",
          "group_attribute", "organism_attribute", "clinical_attribute"}},
        {"sequence",
         {"molecular_sequence", "nucleotide_sequence", "amino_acid_sequence",
          "carbohydrate_sequence"}},
        {"group",
         {"group", "professional_or_occupational_group", "population_group", "family_group",
          "age_group", "patient_or_disabled_group"}},
        {"organization",
         {"organization", "health_care_related_organization", "professional_society",
          "self_help_or_relief_organization", "occupation_or_discipline",
          "biomedical_occupation_or_discipline"}},
    };
    return data;
}

struct Rule {
    const char* relation;
    const char* domain;
    const char* range;
};

const std::vector<Rule>& umls_rules() {
    static const std::vector<Rule> data = {
        {"affects", "chemical", "function"},      {"affects", "bioactive", "function"},
        {"affects", "function", "function"},      {"affects", "dysfunction", "function"},
        {"affects", "organism", "function"},      {"affects", "phenomenon", "function"},
        {"causes", "chemical", "dysfunction"},    {"causes", "organism", "dysfunction"},
        {"causes", "phenomenon", "dysfunction"},  {"causes", "finding", "dysfunction"},
        {"complicates", "dysfunction", "dysfunction"},
        {"complicates", "finding", "dysfunction"},
        {"degree_of", "dysfunction", "dysfunction"},
        {"diagnoses", "procedure", "dysfunction"},
        {"disrupts", "chemical", "function"},     {"disrupts", "bioactive", "anatomy"},
        {"disrupts", "dysfunction", "function"},
        {"interacts_with", "chemical", "chemical"},
        {"interacts_with", "bioactive", "chemical"},
        {"interacts_with", "microbe", "organism"},
        {"location_of", "anatomy", "function"},   {"location_of", "anatomy", "dysfunction"},
        {"location_of", "anatomy", "bioactive"},  {"location_of", "geoarea", "organism"},
        {"manifestation_of", "finding", "function"},
        {"manifestation_of", "dysfunction", "function"},
        {"measurement_of", "concept", "function"},
        {"measures", "procedure", "function"},    {"measures", "object", "chemical"},
        {"method_of", "procedure", "procedure"},
        {"occurs_in", "dysfunction", "group"},    {"occurs_in", "phenomenon", "phenomenon"},
        {"part_of", "anatomy", "anatomy"},        {"part_of", "anatomy", "host"},
        {"part_of", "sequence", "sequence"},
        {"practices", "group", "procedure"},      {"practices", "organization", "procedure"},
        {"precedes", "function", "function"},     {"precedes", "procedure", "procedure"},
        {"prevents", "bioactive", "dysfunction"}, {"prevents", "procedure", "dysfunction"},
        {"process_of", "function", "organism"},   {"process_of", "dysfunction", "organism"},
        {"produces", "organism", "bioactive"},    {"produces", "anatomy", "body_substance"},
        {"property_of", "concept", "chemical"},
        {"result_of", "finding", "function"},     {"result_of", "dysfunction", "phenomenon"},
        {"result_of", "phenomenon", "phenomenon"},
        {"treats", "bioactive", "dysfunction"},   {"treats", "procedure", "dysfunction"},
        {"treats", "group", "dysfunction"},
        {"uses", "procedure", "object"},          {"uses", "procedure", "chemical"},
        {"uses", "group", "object"},
        {"performs", "group", "activity"},        {"performs", "organization", "activity"},
        {"carries_out", "group", "procedure"},
        {"exhibits", "organism", "activity"},     {"exhibits", "group", "activity"},
        {"manages", "organization", "dysfunction"},
        {"issue_in", "dysfunction", "organization"},
        {"issue_in", "concept", "organization"},
        {"assesses_effect_of", "procedure", "chemical"},
        {"associated_with", "finding", "dysfunction"},
        {"associated_with", "concept", "function"},
        {"co_occurs_with", "finding", "finding"}, {"co_occurs_with", "dysfunction", "dysfunction"},
        {"conceptual_part_of", "concept", "concept"},
        {"conceptually_related_to", "concept", "concept"},
        {"consists_of", "object", "chemical"},    {"consists_of", "anatomy", "body_substance"},
        {"contains", "object", "bioactive"},      {"contains", "anatomy", "body_substance"},
        {"derivative_of", "chemical", "chemical"},
        {"developmental_form_of", "organism", "organism"},
        {"evaluation_of", "finding", "function"},
        {"indicates", "finding", "dysfunction"},
        {"ingredient_of", "chemical", "bioactive"},
        {"isa", "organism", "taxon_head"},        {"isa", "anatomy", "anat_head"},
        {"isa", "function", "function"},          {"isa", "dysfunction", "function"},
        {"isa", "chemical", "chem_head"},         {"isa", "bioactive", "chem_head"},
        {"isa", "activity", "activity"},          {"isa", "procedure", "activity"},
        {"isa", "concept", "concept_head"},       {"isa", "group", "group"},
        {"adjacent_to", "anat_part", "anat_part"},
        {"analyzes", "procedure", "chemical"},
        {"branch_of", "anat_part", "anat_part"},
        {"surrounds", "anat_part", "anat_part"},
        {"tributary_of", "anat_part", "anat_part"},
    };
    return data;
}

void make_umls(const fs::path& out_root) {
    std::map<std::string, std::vector<std::string>> groups;
    std::vector<std::string> entities;
    for (const auto& g : umls_groups())
        for (const char* m : g.members) {
            groups[g.name].push_back(m);
            entities.push_back(m);
        }
    // virtual groups reuse members of the base groups to narrow rule ranges
    groups["geoarea"] = {"geographic_area"};
    groups["body_substance"] = {"body_substance", "food"};
    groups["microbe"] = {"archaeon", "bacterium", "rickettsia_or_chlamydia", "virus", "fungus",
                         "alga"};
    groups["taxon_head"] = {"organism", "animal", "plant", "vertebrate", "invertebrate"};
    groups["chem_head"] = {"chemical", "organic_chemical", "inorganic_chemical",
                           "chemical_viewed_functionally", "chemical_viewed_structurally"};
    groups["concept_head"] = {"conceptual_entity", "idea_or_concept"};
    groups["anat_head"] = {"anatomical_structure", "fully_formed_anatomical_structure",
                           "embryonic_structure"};
    groups["host"] = {"organism", "human", "animal", "plant"};
    groups["anat_part"] = {"body_part_organ_or_organ_component", "tissue", "cell",
                           "cell_component", "body_space_or_junction", "body_location_or_region"};
    if (entities.size() != 135)
        throw std::runtime_error("umls: entity count drifted to " + std::to_string(entities.size()));

    std::set<std::string> relations;
    std::vector<RawTriple> pool;
    std::set<RawTriple> seen;
    for (const auto& rule : umls_rules()) {
        relations.insert(rule.relation);
        const auto& dom = groups.at(rule.domain);
        const auto& rng_members = groups.at(rule.range);
        for (const auto& h : dom)
            for (const auto& t : rng_members) {
                if (h == t) continue;
                RawTriple triple{h, rule.relation, t};
                if (seen.insert(triple).second) pool.push_back(triple);
            }
    }
    if (relations.size() != 46)
        throw std::runtime_error("umls: relation count drifted to " + std::to_string(relations.size()));

    constexpr std::size_t kTrain = 5216, kValid = 652, kTest = 661;
    const std::size_t total = kTrain + kValid + kTest;
    if (pool.size() < total)
        throw std::runtime_error("umls: rule pool too small: " + std::to_string(pool.size()));
    std::printf("UMLS: pool %zu -> sampling %zu\n", pool.size(), total);

    Rng rng(727);
    rng.shuffle(pool);

    // keep every entity and relation covered by the train split
    std::vector<RawTriple> train, valid, test;
    std::set<std::string> need_e(entities.begin(), entities.end());
    std::set<std::string> need_r(relations.begin(), relations.end());
    std::vector<RawTriple> rest;
    for (const auto& t : pool) {
        const bool fresh = need_e.count(t.h) || need_e.count(t.t) || need_r.count(t.r);
        if (fresh && train.size() < kTrain) {
            train.push_back(t);
            need_e.erase(t.h);
            need_e.erase(t.t);
            need_r.erase(t.r);
        } else {
            rest.push_back(t);
        }
    }
    if (!need_e.empty() || !need_r.empty())
        throw std::runtime_error("umls: coverage pass failed");
    for (const auto& t : rest) {
        if (train.size() < kTrain) train.push_back(t);
        else if (valid.size() < kValid) valid.push_back(t);
        else if (test.size() < kTest) test.push_back(t);
        else break;
    }
    rng.shuffle(train);

    const fs::path dir = out_root / "UMLS";
    write_split(dir, "train.txt", train);
    write_split(dir, "valid.txt", valid);
    write_split(dir, "test.txt", test);
    std::printf("UMLS: %zu train, %zu valid, %zu test, %zu entities, %zu relations\n",
                train.size(), valid.size(), test.size(), entities.size(), relations.size());
}

// ---------------------------------------------------------------- kinship

void make_kinship(const fs::path& out_root) {
    constexpr int kPersons = 104;
    Rng rng(5150);
    struct Person {
        int section, gender, level;
    };
    std::vector<Person> people(kPersons);
    for (auto& p : people) {
        p.section = static_cast<int>(rng.uniform_int(4));
        p.gender = static_cast<int>(rng.uniform_int(2));
        p.level = static_cast<int>(rng.uniform_int(3));
    }

    auto term_of = [&](int i, int j) {
        const Person& a = people[static_cast<std::size_t>(i)];
        const Person& b = people[static_cast<std::size_t>(j)];
        if (a.section == b.section && a.level == b.level && a.gender == b.gender) return 24;
        const int base = ((a.section - b.section) % 4 + 4) % 4;           // 0..3
        const int dgen = std::clamp(a.level - b.level, -1, 1) + 1;        // 0..2
        return base * 6 + dgen * 2 + b.gender;                            // 0..23
    };

    std::vector<RawTriple> pool;
    for (int i = 0; i < kPersons; ++i)
        for (int j = 0; j < kPersons; ++j) {
            if (i == j) continue;
            pool.push_back({"person" + std::to_string(i), "term" + std::to_string(term_of(i, j)),
                            "person" + std::to_string(j)});
        }

    constexpr std::size_t kTrain = 8544, kValid = 1068, kTest = 1074;
    rng.shuffle(pool);
    std::vector<RawTriple> train(pool.begin(), pool.begin() + kTrain);
    std::vector<RawTriple> valid(pool.begin() + kTrain, pool.begin() + kTrain + kValid);
    std::vector<RawTriple> test(pool.begin() + kTrain + kValid,
                                pool.begin() + kTrain + kValid + kTest);

    const fs::path dir = out_root / "KINSHIP";
    write_split(dir, "train.txt", train);
    write_split(dir, "valid.txt", valid);
    write_split(dir, "test.txt", test);
    std::printf("KINSHIP: %zu train, %zu valid, %zu test\n", train.size(), valid.size(),
                test.size());
}

}  // namespace

int main(int argc, char** argv) {
    fs::path out = "data";
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        if (arg == "--out" && i + 1 < argc) out = argv[++i];
        else {
            std::fprintf(stderr, "usage: %s [--out DIR]\n", argv[0]);
            return 2;
        }
    }
    try {
        make_countries(out, 1);
        make_countries(out, 2);
        make_countries(out, 3);
        make_umls(out);
        make_kinship(out);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
