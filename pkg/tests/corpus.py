"""Hand-written responses with their expected format reward, per reasoning pattern.

Each entry is ``(response, expected_format, expected_answer_or_None)``.
"""

ESR_BODY = ("<transcript>I can't believe you did that</transcript>"
            "<keywords>can't believe</keywords>"
            "<acoustic>high pitch, fast rate</acoustic>"
            "<integration>raised pitch with disbelief</integration>")

IR = [
    # valid
    ("<answer>anger</answer>", 1, "anger"),
    ("<answer>joy</answer>", 1, "joy"),
    ("<answer>neutral</answer>", 1, "neutral"),
    ("  <answer>fear</answer>\n", 1, "fear"),
    ("\n<answer>sadness</answer>", 1, "sadness"),
    ("<answer> Surprise </answer>", 1, "surprise"),
    ("<answer>DISGUST</answer>", 1, "disgust"),
    ("<answer>angry</answer>", 1, None),        # well-formed, label outside meld7
    ("<answer>\tjoy\n</answer>", 1, "joy"),
    ("<answer>not an emotion</answer>", 1, None),
    # bad tags / extra text
    ("", 0, None),
    ("anger", 0, None),
    ("<answer>anger", 0, None),
    ("anger</answer>", 0, None),
    ("<answer></answer>", 0, None),
    ("<answer>   </answer>", 0, None),
    ("The answer is <answer>anger</answer>", 0, "anger"),
    ("<answer>anger</answer> because of tone", 0, "anger"),
    ("<answer>anger</answer><answer>joy</answer>", 0, "joy"),
    ("<Answer>anger</Answer>", 0, None),
    ("<answer>anger</answers>", 0, None),
    ("<answer><b>anger</b></answer>", 0, None),
    # reasoning is not allowed under IR
    ("<think>loud</think><answer>anger</answer>", 0, "anger"),
    ("<answer>anger</answer><think>loud</think>", 0, "anger"),
    ("loud</think><answer>anger</answer>", 0, "anger"),
    ("<think>loud</think>anger", 0, None),
    ("<answer >anger</answer>", 0, None),
    ("< answer>anger</answer>", 0, None),
    ("<answer>anger</answer>.", 0, "anger"),
    ("answer: anger", 0, None),
    ("<answer>anger<answer>", 0, None),
]

EUR = [
    # valid
    ("<think>The speaker raises their voice.</think><answer>anger</answer>", 1, "anger"),
    ("<think>calm and flat</think>\n<answer>neutral</answer>", 1, "neutral"),
    ("  <think>laughing</think>  <answer>joy</answer>  ", 1, "joy"),
    ("<think>multi\nline\nreasoning</think><answer>sadness</answer>", 1, "sadness"),
    ("<think>trembling, 3 < 4 is unrelated</think><answer>fear</answer>", 1, "fear"),
    ("<think>gasps</think><answer>Surprise</answer>", 1, "surprise"),
    ("<think>a <b>bold</b> remark</think><answer>disgust</answer>", 1, "disgust"),
    ("<think>x</think><answer>happy</answer>", 1, None),
    ("<think>\n  sighs heavily\n</think>\n<answer>\nsadness\n</answer>\n", 1, "sadness"),
    ("<think>a>b</think><answer>joy</answer>", 1, "joy"),
    # missing pieces
    ("<answer>anger</answer>", 0, "anger"),
    ("<think>loud</think>", 0, None),
    ("loud</think><answer>anger</answer>", 0, "anger"),
    ("<think>loud<answer>anger</answer>", 0, "anger"),
    ("<think>loud</think>anger", 0, None),
    ("<think></think><answer>anger</answer>", 0, "anger"),
    ("<think>   </think><answer>anger</answer>", 0, "anger"),
    ("<think>loud</think><answer></answer>", 0, None),
    # wrong order / duplicates
    ("<answer>anger</answer><think>loud</think>", 0, "anger"),
    ("<think>a</think><think>b</think><answer>anger</answer>", 0, "anger"),
    ("<think>a</think><answer>anger</answer><answer>joy</answer>", 0, "joy"),
    ("<think>a <think>b</think></think><answer>anger</answer>", 0, "anger"),
    ("<think>I'd say <answer>joy</answer></think><answer>anger</answer>", 0, "anger"),
    # stray text outside the blocks
    ("Sure! <think>loud</think><answer>anger</answer>", 0, "anger"),
    ("<think>loud</think> so <answer>anger</answer>", 0, "anger"),
    ("<think>loud</think><answer>anger</answer> done", 0, "anger"),
    # broken tags
    ("<think>loud</thinking><answer>anger</answer>", 0, "anger"),
    ("<THINK>loud</THINK><answer>anger</answer>", 0, "anger"),
    ("<think>loud</think><answer>anger</answer", 0, None),
    ("<think>loud</think><answer><i>anger</i></answer>", 0, None),
    ("", 0, None),
]

ESR = [
    # valid
    (f"<think>{ESR_BODY}</think><answer>surprise</answer>", 1, "surprise"),
    (f"<think>\n{ESR_BODY}\n</think>\n<answer>anger</answer>\n", 1, "anger"),
    ("<think><transcript>fine.</transcript> <keywords>fine</keywords>\n<acoustic>low energy</acoustic>"
     "<integration>flat delivery</integration></think><answer>neutral</answer>", 1, "neutral"),
    ("<think><transcript>a</transcript><keywords>b</keywords><acoustic>c</acoustic>"
     "<integration>d</integration></think><answer>Joy</answer>", 1, "joy"),
    ("<think><transcript>multi\nline</transcript><keywords>k</keywords><acoustic>slow, breathy</acoustic>"
     "<integration>sad tone</integration></think><answer>sadness</answer>", 1, "sadness"),
    (f"  <think>{ESR_BODY}</think>  <answer>fear</answer>", 1, "fear"),
    ("<think><transcript>ugh</transcript><keywords>ugh, gross</keywords><acoustic>nasal</acoustic>"
     "<integration>repulsion</integration></think><answer>disgust</answer>", 1, "disgust"),
    (f"<think>{ESR_BODY}</think><answer>calm</answer>", 1, None),
    ("<think><transcript>3 > 2</transcript><keywords>k</keywords><acoustic>a</acoustic>"
     "<integration>i</integration></think><answer>joy</answer>", 0, "joy"),   # '>' inside a section is disallowed
    # unstructured think is not enough
    ("<think>loud voice</think><answer>anger</answer>", 0, "anger"),
    ("<answer>anger</answer>", 0, "anger"),
    # missing sections
    ("<think><transcript>a</transcript><keywords>b</keywords><acoustic>c</acoustic></think>"
     "<answer>anger</answer>", 0, "anger"),
    ("<think><keywords>b</keywords><acoustic>c</acoustic><integration>d</integration></think>"
     "<answer>anger</answer>", 0, "anger"),
    ("<think><transcript>a</transcript><acoustic>c</acoustic><integration>d</integration></think>"
     "<answer>anger</answer>", 0, "anger"),
    # out of order sections
    ("<think><keywords>b</keywords><transcript>a</transcript><acoustic>c</acoustic>"
     "<integration>d</integration></think><answer>anger</answer>", 0, "anger"),
    ("<think><transcript>a</transcript><keywords>b</keywords><integration>d</integration>"
     "<acoustic>c</acoustic></think><answer>anger</answer>", 0, "anger"),
    # empty or blank sections
    ("<think><transcript></transcript><keywords>b</keywords><acoustic>c</acoustic>"
     "<integration>d</integration></think><answer>anger</answer>", 0, "anger"),
    ("<think><transcript>a</transcript><keywords>b</keywords><acoustic> </acoustic>"
     "<integration>d</integration></think><answer>anger</answer>", 0, "anger"),
    # extra text between or around sections
    ("<think><transcript>a</transcript> and <keywords>b</keywords><acoustic>c</acoustic>"
     "<integration>d</integration></think><answer>anger</answer>", 0, "anger"),
    (f"<think>Let me see. {ESR_BODY}</think><answer>anger</answer>", 0, "anger"),
    (f"<think>{ESR_BODY}</think> therefore <answer>anger</answer>", 0, "anger"),
    # duplicated section
    ("<think><transcript>a</transcript><transcript>a</transcript><keywords>b</keywords>"
     "<acoustic>c</acoustic><integration>d</integration></think><answer>anger</answer>", 0, "anger"),
    # outer structure broken
    (f"{ESR_BODY}</think><answer>anger</answer>", 0, "anger"),
    (f"<think>{ESR_BODY}<answer>anger</answer>", 0, "anger"),
    (f"<answer>anger</answer><think>{ESR_BODY}</think>", 0, "anger"),
    (f"<think>{ESR_BODY}</think>anger", 0, None),
    (f"<think>{ESR_BODY}</think><answer></answer>", 0, None),
    (f"{ESR_BODY}<answer>anger</answer>", 0, "anger"),
    (f"<think>{ESR_BODY}</think><answer>anger</answer><answer>fear</answer>", 0, "fear"),
    ("<think><transcript>a</transcript><keywords>b</keywords><acoustic>c</acoustic>"
     "<integration>d</integration><notes>e</notes></think><answer>anger</answer>", 0, "anger"),
    ("", 0, None),
]

CORPUS = {"ir": IR, "eur": EUR, "esr": ESR}
