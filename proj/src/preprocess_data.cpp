// Built-in preprocessing data: the fixed 179-entry English stopword list and
// the default lemma lexicon (irregular exceptions + morphy-style suffix rules
// validated against a base vocabulary of common lemmas).

#include "bestseller/preprocess.hpp"
#include "bestseller/util.hpp"

namespace bestseller {

namespace {

const char* kStopwords =
    "i me my myself we our ours ourselves you you're you've you'll you'd your "
    "yours yourself yourselves he him his himself she she's her hers herself "
    "it it's its itself they them their theirs themselves what which who whom "
    "this that that'll these those am is are was were be been being have has "
    "had having do does did doing a an the and but if or because as until "
    "while of at by for with about against between into through during before "
    "after above below to from up down in out on off over under again further "
    "then once here there when where why how all any both each few more most "
    "other some such no nor not only own same so than too very s t can will "
    "just don don't should should've now d ll m o re ve y ain aren aren't "
    "couldn couldn't didn didn't doesn doesn't hadn hadn't hasn hasn't haven "
    "haven't isn isn't ma mightn mightn't mustn mustn't needn needn't shan "
    "shan't shouldn shouldn't wasn wasn't weren weren't won won't wouldn "
    "wouldn't";

// word -> lemma, irregular forms only.
const char* kExceptions =
    "took take taken take went go gone go came come children child men man "
    "women woman feet foot teeth tooth mice mouse geese goose wives wife "
    "knives knife lives life leaves leaf wolves wolf selves self shelves shelf "
    "loaves loaf thieves thief calves calf halves half saw see seen see began "
    "begin begun begin spoke speak spoken speak broke break broken break "
    "chose choose chosen choose drove drive driven drive wrote write written "
    "write rode ride ridden ride rose rise risen rise fell fall fallen fall "
    "felt feel flew fly flown fly forgot forget forgotten forget gave give "
    "given give grew grow grown grow heard hear held hold hid hide hidden "
    "hide kept keep knew know known know laid lay lain lie led lead "
    "lost lose made make meant mean met meet paid pay ran run rang ring rung "
    "ring sang sing sung sing sat sit sent send shook shake shaken shake "
    "shone shine shot shoot slept sleep sold sell spent spend stood stand "
    "stole steal stolen steal struck strike swam swim swum swim swore swear "
    "sworn swear threw throw thrown throw told tell understood understand "
    "wore wear worn wear woke wake woken wake caught catch bought buy brought "
    "bring built build dealt deal drew draw drawn draw fought fight found "
    "find sought seek taught teach wept weep worse bad worst bad better good "
    "best good further far people person stories story bodies body ladies "
    "lady armies army cities city countries country eyes eye";

// Ordered suffix rules; a rule fires only when its result is a known lemma.
const char* kSuffixRules =
    "sses ss\n"
    "ches ch\n"
    "shes sh\n"
    "ies y\n"
    "xes x\n"
    "zes z\n"
    "ves f\n"
    "ied y\n"
    "ying y\n"
    "ing e\n"
    "ing \n"
    "es e\n"
    "es \n"
    "ed e\n"
    "ed \n"
    "est \n"
    "est e\n"
    "er \n"
    "er e\n"
    "s \n";

const char* kBaseVocabulary =
    "able accept act add address age agree air allow answer appear apple arm "
    "army arrive ask attach average back bad bag ball bank base battle bear "
    "beat beauty become bed begin believe bell belong bend beside big bird "
    "bit black blood blow blue board boat body bone book boy branch bread "
    "break breath bridge bright bring brother brown build burn business busy "
    "buy call calm camp car card care carry case cast cat catch cause center "
    "chair chance change character charge chief child choose church circle "
    "city claim class clean clear climb close cloud coat cold color come "
    "command common company compare complete condition consider contain "
    "continue control copy corner cost count country course cover create "
    "cross crowd cry current cut dance danger dark day dead deal dear death "
    "decide deep demand desire die difficult dinner direct distance divide "
    "doctor dog door doubt draw dream dress drift drink drive drop dry ear "
    "early earth ease east eat edge effect egg elect end enemy engine enjoy "
    "enter escape evening event examination example exhibit exist expect "
    "experience explain express face fact fail fair faith fall family fancy "
    "far farm fast father favor fear feed feel fellow field fight figure "
    "fill find fine finger finish fire fish fit fix floor flow flower fly "
    "follow food foot force forget form fortune forward free fresh friend "
    "front fruit full gain game garden gate gather gentle girl give glance "
    "glass go gold good govern grand grass grave gray great green grey "
    "ground group grow guard guess guide hand hang happen happy hard hate "
    "have head hear heart heat heavy help hide high hill hold hole home hope "
    "horse hot hour house human hundred hurry idea improve inch instant "
    "instruction interest iron join journey joy judge jump keep kill kind "
    "king kiss know lady lake land large last laugh law lay lead learn leave "
    "length lesson letter level lie life lift light like line lip listen "
    "live long look lose love low machine make man manner mark market marry "
    "master matter mean measure meet member memory middle mile mind mine "
    "minute miss moment money month moon morning mother motion motive "
    "mountain mouth move music name nation nature near neck need new news "
    "night north note notice number object observe occasion offer office "
    "officer open order ordinary page pain paint paper part party pass past "
    "pause pay peace person picture piece place plain plan plant play please "
    "point poor position possess pound power practice prepare present press "
    "pretty price prince promise prove pull push put question quick quiet "
    "race raise reach read ready reason receive reckless record red remain "
    "remark remember reply report rest return rich ride ring rise river road "
    "rock roll room rough round rule run sail save say scene school sea "
    "search season seat second secret see seem sell send sense serve service "
    "set settle shade shake shape share sharp shine ship shoot shop shore "
    "short shoulder shout show side sign silence silver simple sing sister "
    "sit sleep slow small smile snow soft soldier sort sound south speak "
    "spend spirit spot spread spring square stand star start state station "
    "stay step stick stone stop store storm story strange stream street "
    "stretch strike strong struggle study subject substance succeed suffer "
    "suggest summer sun supply support suppose sure surprise sweet table "
    "take talk teach teacher tear tell term thank thick thin thing think "
    "thought thousand throw tie time tone top touch town trade train travel "
    "treat tree trouble trust truth try turn understand use valley value "
    "view village visit voice wait walk wall want war warm watch water wave "
    "way wear weather week weight welcome west wheel white wide wild will "
    "wind window winter wish woman wonder wood word work world write wrong "
    "yard year yellow young";

std::unordered_set<std::string> parse_word_set(const char* data) {
    std::unordered_set<std::string> out;
    for (const auto& w : split_on(data, ' '))
        if (!w.empty()) out.insert(w);
    return out;
}

}  // namespace

const StopwordList& StopwordList::builtin() {
    static const StopwordList list = [] {
        StopwordList l;
        l.source_name = "builtin-english-179";
        l.words = parse_word_set(kStopwords);
        return l;
    }();
    return list;
}

const LemmaLexicon& LemmaLexicon::builtin() {
    static const LemmaLexicon lex = [] {
        LemmaLexicon l;
        l.source_name = "builtin-english";
        auto pairs = split_on(kExceptions, ' ');
        for (std::size_t i = 0; i + 1 < pairs.size(); i += 2)
            l.exceptions[pairs[i]] = pairs[i + 1];
        for (const auto& line : split_on(kSuffixRules, '\n')) {
            if (line.empty()) continue;
            auto pos = line.find(' ');
            l.suffix_rules.emplace_back(line.substr(0, pos),
                                        pos == std::string::npos ? "" : line.substr(pos + 1));
        }
        l.base_vocabulary = parse_word_set(kBaseVocabulary);
        return l;
    }();
    return lex;
}

}  // namespace bestseller
